use std::process::Command;

use supercong::registry::{parse, CaseStatus};
use supercong::runner::{emit, registry_hash, run, sieve_primes, Format, RunConfig};

const REG: &str = r#"
conjecture "good" proved {
  exclude 2, 3
  sum a = SUM(k)[C(2k,k)^3 * rpow(1/64)]
  case p%4 in {3} : S(a) === 0 mod p^2
  case rep(1,4,1) : S(a) === 4*x^2 - 2*p mod p^2
}

conjecture "bad" conjectured {
  exclude 2, 3
  sum a = SUM(k)[C(2k,k)^3 * rpow(1/64)]
  case rep(1,4,1) : S(a) === 4*x^2 - 2*p + p mod p^2 suspect 4*x^2 - 2*p
}

conjecture "five" conjectured {
  sum a = SUM(k)[C(2k,k) * rpow(1/5)]
  case p%2 in {1} : S(a) === S(a) mod p
}
"#;

fn cfg(lo: u64, hi: u64) -> RunConfig {
    RunConfig {
        lo,
        hi,
        ..RunConfig::default()
    }
}

fn report(lo: u64, hi: u64) -> supercong::runner::Report {
    let reg = parse(REG).unwrap();
    run(&reg, REG, &cfg(lo, hi)).unwrap()
}

#[test]
fn sieve_matches_trial_division() {
    let slow: Vec<u64> = (50..400).filter(|&n| (2..n).all(|d| n % d != 0)).collect();
    assert_eq!(sieve_primes(50, 399), slow);
    assert!(sieve_primes(10, 9).is_empty());
    assert_eq!(sieve_primes(0, 2), [2]);
}

#[test]
fn statuses_are_assigned() {
    let rep = report(5, 200);
    let of = |id: &'static str| rep.records.iter().filter(move |r| r.conj == id);
    assert!(of("good").all(|r| r.status == CaseStatus::Pass));
    let bad: Vec<_> = of("bad").collect();
    assert!(bad.iter().any(|r| r.status == CaseStatus::NoCase));
    for r in bad.iter().filter(|r| r.status == CaseStatus::Fail) {
        let note = r.note.as_deref().unwrap();
        assert!(note.contains("alternative reading: pass"), "{note}");
        assert!(note.contains("oracle-confirmed"), "{note}");
    }
    let five: Vec<_> = of("five").filter(|r| r.p == 5).collect();
    assert_eq!(five.len(), 1);
    assert_eq!(five[0].status, CaseStatus::Skipped);
    assert_eq!(rep.exit_code(), 1);
}

#[test]
fn records_are_sorted() {
    let rep = report(5, 300);
    let keys: Vec<_> = rep.records.iter().map(|r| (r.conj.clone(), r.p, r.case)).collect();
    let ids: Vec<_> = rep.summary().into_iter().map(|(id, _)| id).collect();
    assert_eq!(ids, ["bad", "five", "good"]);
    for w in keys.windows(2) {
        assert!(w[0] <= w[1], "{:?} then {:?}", w[0], w[1]);
    }
}

#[test]
fn exit_code_is_zero_when_everything_passes() {
    let reg = parse(REG).unwrap();
    let c = RunConfig {
        filter: Some("good".into()),
        ..cfg(5, 300)
    };
    assert_eq!(run(&reg, REG, &c).unwrap().exit_code(), 0);
}

#[test]
fn invalid_range_and_filter_are_errors() {
    let reg = parse(REG).unwrap();
    assert!(run(&reg, REG, &cfg(1, 50)).is_err());
    assert!(run(&reg, REG, &cfg(50, 10)).is_err());
    assert!(run(&reg, REG, &cfg(5, 1 << 20)).is_err());
    let c = RunConfig {
        filter: Some("[".into()),
        ..cfg(5, 50)
    };
    assert!(run(&reg, REG, &c).is_err());
}

#[test]
fn worker_count_does_not_change_output() {
    let reg = parse(REG).unwrap();
    let at = |jobs| {
        let c = RunConfig { jobs, ..cfg(5, 800) };
        emit(&run(&reg, REG, &c).unwrap(), Format::Jsonl)
    };
    let one = at(1);
    for jobs in [2, 3, 8] {
        assert_eq!(one, at(jobs));
    }
}

#[test]
fn jsonl_has_meta_then_one_line_per_record() {
    let rep = report(5, 100);
    let out = String::from_utf8(emit(&rep, Format::Jsonl)).unwrap();
    let lines: Vec<serde_json::Value> = out.lines().map(|l| serde_json::from_str(l).unwrap()).collect();
    assert_eq!(lines.len(), rep.records.len() + 1);
    let meta = &lines[0]["meta"];
    assert_eq!(meta["registry_sha256"], registry_hash(REG));
    assert_eq!(meta["records"], rep.records.len());
    assert_eq!(lines[1]["conj"], "bad");
    assert!(lines[1..].iter().all(|l| l["mod"].is_u64()));
}

#[test]
fn csv_has_header_and_rows() {
    let rep = report(5, 100);
    let out = String::from_utf8(emit(&rep, Format::Csv)).unwrap();
    let mut rows = out.lines();
    assert_eq!(rows.next().unwrap(), "conj,p,case,status,lhs,rhs,mod,note");
    assert_eq!(rows.count(), rep.records.len());
}

#[test]
fn table_lists_problems() {
    let out = String::from_utf8(emit(&report(5, 100), Format::Table)).unwrap();
    assert!(out.starts_with("registry sha256 "));
    assert!(out.contains("TOTAL"));
    assert!(out.contains("problems:"));
    assert!(out.contains("bad p=5 case 1 fail"));
}

#[test]
fn registry_hash_is_sha256() {
    assert_eq!(
        registry_hash(""),
        "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855"
    );
}

#[test]
fn cli_verify_and_fit() {
    let bin = env!("CARGO_BIN_EXE_supercong");
    let dir = std::env::temp_dir().join(format!("supercong-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("reg.conj");
    std::fs::write(&path, REG).unwrap();

    let out = Command::new(bin)
        .args(["verify", "--primes", "5..100", "--filter", "good", "--format", "csv", "--registry"])
        .arg(&path)
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&out.stdout).starts_with("conj,p,case"));

    let out = Command::new(bin)
        .args(["verify", "--primes", "5..100", "--registry"])
        .arg(&path)
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));

    std::fs::write(&path, "conjecture \"x\" proved {").unwrap();
    let out = Command::new(bin).args(["verify", "--registry"]).arg(&path).output().unwrap();
    assert_eq!(out.status.code(), Some(2));

    let out = Command::new(bin)
        .args(["fit", "--family", "2.33prod", "--primes", "13,29,41,73,101", "--bound", "10^6"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&out.stdout).contains("c = 25/22"));

    let out = Command::new(bin).args(["fit", "--family", "nope", "--primes", "5..50"]).output().unwrap();
    assert_ne!(out.status.code(), Some(0));
    std::fs::remove_dir_all(&dir).unwrap();
}
