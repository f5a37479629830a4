//! End-to-end tests of the binary: golden outputs, determinism, exit codes
//! for malformed input, tampering, the reference-size guard, and both input
//! formats.

use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn bwtlcp(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_bwtlcp"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn exit_code(output: &Output) -> i32 {
    output.status.code().expect("no signal")
}

fn stderr_of(output: &Output) -> String {
    String::from_utf8_lossy(&output.stderr).into_owned()
}

fn write(path: &Path, contents: &str) {
    fs::write(path, contents).unwrap();
}

const EXAMPLE: &str = "TCGT\nACCT\nAACA\n";

#[test]
fn build_writes_the_expected_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("reads.txt");
    write(&input, EXAMPLE);
    let work = dir.path().join("work");

    let output = bwtlcp(&[
        "build",
        "--input",
        input.to_str().unwrap(),
        "--workdir",
        work.to_str().unwrap(),
        "--text",
    ]);
    assert_eq!(exit_code(&output), 0, "stderr: {}", stderr_of(&output));

    let bwt = fs::read_to_string(work.join("bwt.txt")).unwrap();
    assert_eq!(bwt, "TTAC$A$AATCCGC$\n");
    let lcp = fs::read_to_string(work.join("lcp.txt")).unwrap();
    let values: Vec<i64> = lcp.lines().map(|l| l.parse().unwrap()).collect();
    assert_eq!(values, vec![-1, 0, 0, 0, 1, 1, 2, 0, 1, 1, 1, 0, 0, 1, 1]);
    assert!(work.join("bwt.bin").exists());
    assert!(work.join("lcp.bin").exists());
    let stats = fs::read_to_string(work.join("stats.txt")).unwrap();
    assert!(stats.contains("passes=3"), "stats:\n{stats}");
}

#[test]
fn repeated_builds_are_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("reads.txt");
    write(&input, EXAMPLE);

    let mut snapshots = Vec::new();
    for name in ["first", "second"] {
        let work = dir.path().join(name);
        let output = bwtlcp(&[
            "build",
            "--input",
            input.to_str().unwrap(),
            "--workdir",
            work.to_str().unwrap(),
        ]);
        assert_eq!(exit_code(&output), 0, "stderr: {}", stderr_of(&output));
        snapshots.push((
            fs::read(work.join("bwt.bin")).unwrap(),
            fs::read(work.join("lcp.bin")).unwrap(),
            fs::read(work.join("stats.txt")).unwrap(),
        ));
    }
    assert_eq!(snapshots[0], snapshots[1]);
}

#[test]
fn characters_outside_the_alphabet_name_their_line() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("reads.txt");
    write(&input, "ACGT\nACXT\n");
    let output = bwtlcp(&[
        "build",
        "--input",
        input.to_str().unwrap(),
        "--workdir",
        dir.path().join("work").to_str().unwrap(),
    ]);
    assert_eq!(exit_code(&output), 1);
    let stderr = stderr_of(&output);
    assert!(stderr.contains("line 2"), "stderr: {stderr}");
    assert!(stderr.contains('X'), "stderr: {stderr}");
}

#[test]
fn ragged_lines_are_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("reads.txt");
    write(&input, "ACGT\nACG\n");
    let output = bwtlcp(&[
        "build",
        "--input",
        input.to_str().unwrap(),
        "--workdir",
        dir.path().join("work").to_str().unwrap(),
    ]);
    assert_eq!(exit_code(&output), 1);
}

#[test]
fn verify_accepts_an_honest_build() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("reads.txt");
    write(&input, EXAMPLE);
    let work = dir.path().join("work");
    let build = bwtlcp(&[
        "build",
        "--input",
        input.to_str().unwrap(),
        "--workdir",
        work.to_str().unwrap(),
    ]);
    assert_eq!(exit_code(&build), 0);

    let verify = bwtlcp(&[
        "verify",
        "--input",
        input.to_str().unwrap(),
        "--workdir",
        work.to_str().unwrap(),
    ]);
    assert_eq!(exit_code(&verify), 0, "stderr: {}", stderr_of(&verify));
}

#[test]
fn verify_flags_a_tampered_transform() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("reads.txt");
    write(&input, EXAMPLE);
    let work = dir.path().join("work");
    let build = bwtlcp(&[
        "build",
        "--input",
        input.to_str().unwrap(),
        "--workdir",
        work.to_str().unwrap(),
    ]);
    assert_eq!(exit_code(&build), 0);

    // Replace one per-length transform with different but well-formed
    // symbols; verification must rebuild on top of it and diverge.
    fs::write(work.join("B_2.bin"), [2u8, 2, 2]).unwrap();
    let verify = bwtlcp(&[
        "verify",
        "--input",
        input.to_str().unwrap(),
        "--workdir",
        work.to_str().unwrap(),
    ]);
    assert_eq!(exit_code(&verify), 3, "stderr: {}", stderr_of(&verify));
    assert!(
        stderr_of(&verify).contains("divergence"),
        "stderr: {}",
        stderr_of(&verify)
    );
}

#[test]
fn verify_guard_refuses_oversized_collections() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("reads.txt");
    write(&input, EXAMPLE);
    let output = bwtlcp(&[
        "verify",
        "--input",
        input.to_str().unwrap(),
        "--workdir",
        dir.path().join("work").to_str().unwrap(),
        "--max-oracle-size",
        "10",
    ]);
    assert_eq!(exit_code(&output), 4, "stderr: {}", stderr_of(&output));
}

#[test]
fn stats_requires_a_previous_build() {
    let dir = tempfile::tempdir().unwrap();
    let output = bwtlcp(&["stats", "--workdir", dir.path().to_str().unwrap()]);
    assert_eq!(exit_code(&output), 1, "stderr: {}", stderr_of(&output));
}

#[test]
fn stats_reports_the_build_counters() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("reads.txt");
    write(&input, EXAMPLE);
    let work = dir.path().join("work");
    let build = bwtlcp(&[
        "build",
        "--input",
        input.to_str().unwrap(),
        "--workdir",
        work.to_str().unwrap(),
    ]);
    assert_eq!(exit_code(&build), 0);

    let stats = bwtlcp(&["stats", "--workdir", work.to_str().unwrap()]);
    assert_eq!(exit_code(&stats), 0);
    let text = String::from_utf8_lossy(&stats.stdout).into_owned();
    assert!(text.contains("merge passes:            3"), "stdout: {text}");
    assert!(text.contains("pass 3:"), "stdout: {text}");
}

#[test]
fn fasta_records_build_the_same_outputs_as_lines() {
    let dir = tempfile::tempdir().unwrap();
    let lines_input = dir.path().join("reads.txt");
    write(&lines_input, EXAMPLE);
    let fasta_input = dir.path().join("reads.fa");
    write(
        &fasta_input,
        ">read1\nTCGT\n>read2\nAC\nCT\n>read3\nAACA\n",
    );

    let lines_work = dir.path().join("lines");
    let fasta_work = dir.path().join("fasta");
    for (input, work, format) in [
        (&lines_input, &lines_work, "lines"),
        (&fasta_input, &fasta_work, "fasta"),
    ] {
        let output = bwtlcp(&[
            "build",
            "--input",
            input.to_str().unwrap(),
            "--workdir",
            work.to_str().unwrap(),
            "--format",
            format,
        ]);
        assert_eq!(exit_code(&output), 0, "stderr: {}", stderr_of(&output));
    }
    assert_eq!(
        fs::read(lines_work.join("bwt.bin")).unwrap(),
        fs::read(fasta_work.join("bwt.bin")).unwrap(),
    );
    assert_eq!(
        fs::read(lines_work.join("lcp.bin")).unwrap(),
        fs::read(fasta_work.join("lcp.bin")).unwrap(),
    );
}

#[test]
fn output_copies_match_the_working_directory() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("reads.txt");
    write(&input, EXAMPLE);
    let work = dir.path().join("work");
    let bwt_copy = dir.path().join("result.bwt");
    let lcp_copy = dir.path().join("result.lcp");
    let output = bwtlcp(&[
        "build",
        "--input",
        input.to_str().unwrap(),
        "--workdir",
        work.to_str().unwrap(),
        "--out-bwt",
        bwt_copy.to_str().unwrap(),
        "--out-lcp",
        lcp_copy.to_str().unwrap(),
    ]);
    assert_eq!(exit_code(&output), 0, "stderr: {}", stderr_of(&output));
    assert_eq!(
        fs::read(&bwt_copy).unwrap(),
        fs::read(work.join("bwt.bin")).unwrap(),
    );
    assert_eq!(
        fs::read(&lcp_copy).unwrap(),
        fs::read(work.join("lcp.bin")).unwrap(),
    );
}

#[test]
fn keep_intermediates_preserves_the_number_lists() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("reads.txt");
    write(&input, EXAMPLE);
    let work = dir.path().join("work");
    let output = bwtlcp(&[
        "build",
        "--input",
        input.to_str().unwrap(),
        "--workdir",
        work.to_str().unwrap(),
        "--keep-intermediates",
    ]);
    assert_eq!(exit_code(&output), 0);
    assert!(work.join("N_1.bin").exists());

    let without = dir.path().join("plain");
    let output = bwtlcp(&[
        "build",
        "--input",
        input.to_str().unwrap(),
        "--workdir",
        without.to_str().unwrap(),
    ]);
    assert_eq!(exit_code(&output), 0);
    assert!(!without.join("N_1.bin").exists());
}

#[test]
fn input_inside_the_working_directory_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let work = dir.path().join("work");
    fs::create_dir_all(&work).unwrap();
    let input = work.join("reads.txt");
    write(&input, EXAMPLE);
    let output = bwtlcp(&[
        "build",
        "--input",
        input.to_str().unwrap(),
        "--workdir",
        work.to_str().unwrap(),
    ]);
    assert_eq!(exit_code(&output), 1, "stderr: {}", stderr_of(&output));
}

#[test]
fn empty_input_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("reads.txt");
    write(&input, "");
    let output = bwtlcp(&[
        "build",
        "--input",
        input.to_str().unwrap(),
        "--workdir",
        dir.path().join("work").to_str().unwrap(),
    ]);
    assert_eq!(exit_code(&output), 1);
}
