//! Prime generation, parallel verification and report emission.

use std::cmp::Ordering;
use std::fmt::Write as _;

use rayon::prelude::*;
use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::error::RunError;
use crate::exact::ExactEnv;
use crate::modular::MAX_PRIME;
use crate::registry::{
    recheck_exact, verify_with, CaseResult, CaseStatus, ConjectureSpec, PrimeEnv, Registry,
};

/// All primes in `[lo, hi]`, ascending.
pub fn sieve_primes(lo: u64, hi: u64) -> Vec<u64> {
    if hi < 2 || lo > hi {
        return Vec::new();
    }
    let n = hi as usize;
    let mut composite = vec![false; n + 1];
    let mut out = Vec::new();
    for i in 2..=n {
        if composite[i] {
            continue;
        }
        if i as u64 >= lo {
            out.push(i as u64);
        }
        let mut j = i * i;
        while j <= n {
            composite[j] = true;
            j += i;
        }
    }
    out
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    Jsonl,
    Csv,
    Table,
}

#[derive(Clone, Debug)]
pub struct RunConfig {
    pub lo: u64,
    pub hi: u64,
    /// Glob over conjecture ids.
    pub filter: Option<String>,
    /// Replaces every case's modulus exponent.
    pub power: Option<u32>,
    /// Primes below this are rechecked with the exact oracle.
    pub oracle_below: u64,
    pub jobs: usize,
    /// Also test stated mod-p cases mod p^2.
    pub check_stronger: bool,
    /// Optional run timestamp, recorded verbatim.
    pub timestamp: Option<String>,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            lo: 5,
            hi: 1000,
            filter: None,
            power: None,
            oracle_below: 100,
            jobs: 1,
            check_stronger: false,
            timestamp: None,
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
pub struct Counts {
    pub pass: u64,
    pub fail: u64,
    pub nocase: u64,
    pub ambiguous: u64,
    pub skipped: u64,
    pub engine_error: u64,
}

impl Counts {
    fn add(&mut self, status: CaseStatus) {
        let slot = match status {
            CaseStatus::Pass => &mut self.pass,
            CaseStatus::Fail => &mut self.fail,
            CaseStatus::NoCase => &mut self.nocase,
            CaseStatus::Ambiguous => &mut self.ambiguous,
            CaseStatus::Skipped => &mut self.skipped,
            CaseStatus::EngineError => &mut self.engine_error,
        };
        *slot += 1;
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Report {
    pub registry_sha256: String,
    pub lo: u64,
    pub hi: u64,
    pub timestamp: Option<String>,
    pub records: Vec<CaseResult>,
    /// Results of `check_stronger`; never affect the exit code.
    pub stronger: Vec<CaseResult>,
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
enum IdPart {
    Num(u64),
    Text(String),
}

/// Order ids by their dot-separated parts, numerically where possible.
pub fn compare_ids(a: &str, b: &str) -> Ordering {
    let key = |s: &str| -> Vec<IdPart> {
        s.split('.')
            .map(|part| match part.parse() {
                Ok(n) => IdPart::Num(n),
                Err(_) => IdPart::Text(part.to_string()),
            })
            .collect()
    };
    key(a).cmp(&key(b)).then_with(|| a.cmp(b))
}

fn record_order(a: &CaseResult, b: &CaseResult) -> Ordering {
    compare_ids(&a.conj, &b.conj)
        .then(a.p.cmp(&b.p))
        .then(a.case.cmp(&b.case))
}

impl Report {
    /// Per-conjecture counts in id order.
    pub fn summary(&self) -> Vec<(String, Counts)> {
        let mut out: Vec<(String, Counts)> = Vec::new();
        for r in &self.records {
            match out.last_mut() {
                Some((id, counts)) if *id == r.conj => counts.add(r.status),
                _ => {
                    let mut counts = Counts::default();
                    counts.add(r.status);
                    out.push((r.conj.clone(), counts));
                }
            }
        }
        out
    }

    pub fn totals(&self) -> Counts {
        let mut c = Counts::default();
        for r in &self.records {
            c.add(r.status);
        }
        c
    }

    /// 0 when everything passed or was skipped, 1 on Fail or Ambiguous,
    /// 2 on EngineError.
    pub fn exit_code(&self) -> i32 {
        let t = self.totals();
        if t.engine_error > 0 {
            2
        } else if t.fail > 0 || t.ambiguous > 0 {
            1
        } else {
            0
        }
    }
}

pub fn registry_hash(source: &str) -> String {
    let digest = Sha256::digest(source.as_bytes());
    digest.iter().fold(String::new(), |mut s, b| {
        let _ = write!(s, "{b:02x}");
        s
    })
}

fn selected<'a>(registry: &'a Registry, filter: Option<&str>) -> Result<Vec<&'a ConjectureSpec>, RunError> {
    let pattern = filter
        .map(glob::Pattern::new)
        .transpose()
        .map_err(|e| RunError::Filter(e.to_string()))?;
    Ok(registry
        .conjectures
        .iter()
        .filter(|c| pattern.as_ref().is_none_or(|pat| pat.matches(&c.id)))
        .collect())
}

fn oracle_note(records: &mut [CaseResult], conj: &ConjectureSpec, env: &mut PrimeEnv, exact: &mut ExactEnv, crosscheck: bool) {
    for r in records.iter_mut() {
        let Some(case) = r.case else { continue };
        let checked = match r.status {
            CaseStatus::Pass => crosscheck,
            CaseStatus::Fail => true,
            _ => false,
        };
        if !checked {
            continue;
        }
        let power = r.modulus.ilog(r.p);
        match recheck_exact(conj, case, power, env, exact) {
            Ok(Some((lhs, rhs))) if Some(lhs) == r.lhs && Some(rhs) == r.rhs => {
                if r.status == CaseStatus::Fail {
                    r.note = Some(join_note(r.note.take(), "oracle-confirmed"));
                }
            }
            Ok(Some((lhs, rhs))) => {
                r.status = CaseStatus::EngineError;
                r.note = Some(join_note(
                    r.note.take(),
                    &format!("oracle mismatch: exact lhs {lhs}, rhs {rhs}"),
                ));
            }
            Ok(None) => {}
            Err(e) => {
                r.status = CaseStatus::EngineError;
                r.note = Some(join_note(r.note.take(), &format!("oracle: {e}")));
            }
        }
    }
}

fn join_note(old: Option<String>, new: &str) -> String {
    match old {
        Some(o) => format!("{o}; {new}"),
        None => new.to_string(),
    }
}

fn check_prime(conjs: &[&ConjectureSpec], p: u64, cfg: &RunConfig) -> (Vec<CaseResult>, Vec<CaseResult>) {
    let mut env = PrimeEnv::for_prime(p, 3).expect("sieved primes are valid");
    let mut exact = ExactEnv::new(p);
    let crosscheck = p < cfg.oracle_below;
    let mut records = Vec::new();
    let mut stronger = Vec::new();
    for conj in conjs {
        let mut rs = verify_with(conj, &mut env, cfg.power);
        oracle_note(&mut rs, conj, &mut env, &mut exact, crosscheck);
        records.extend(rs);
        if cfg.check_stronger && conj.cases.iter().any(|c| c.power == 1) {
            let rs = verify_with(conj, &mut env, Some(2));
            stronger.extend(rs.into_iter().filter(|r| {
                r.case.is_some_and(|i| conj.cases[i - 1].power == 1)
                    && matches!(r.status, CaseStatus::Pass | CaseStatus::Fail)
            }));
        }
    }
    (records, stronger)
}

/// Verify every selected conjecture at every prime in the configured range.
pub fn run(registry: &Registry, source: &str, cfg: &RunConfig) -> Result<Report, RunError> {
    if cfg.lo < 3 || cfg.lo > cfg.hi || cfg.hi >= MAX_PRIME {
        return Err(RunError::InvalidRange {
            lo: cfg.lo,
            hi: cfg.hi,
        });
    }
    let conjs = selected(registry, cfg.filter.as_deref())?;
    let primes = sieve_primes(cfg.lo, cfg.hi);
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cfg.jobs.max(1))
        .build()
        .map_err(|e| RunError::Pool(e.to_string()))?;
    let results: Vec<_> = if conjs.is_empty() {
        Vec::new()
    } else {
        pool.install(|| primes.par_iter().map(|&p| check_prime(&conjs, p, cfg)).collect())
    };
    let (mut records, mut stronger): (Vec<_>, Vec<_>) = (Vec::new(), Vec::new());
    for (r, s) in results {
        records.extend(r);
        stronger.extend(s);
    }
    records.sort_by(record_order);
    stronger.sort_by(record_order);
    Ok(Report {
        registry_sha256: registry_hash(source),
        lo: cfg.lo,
        hi: cfg.hi,
        timestamp: cfg.timestamp.clone(),
        records,
        stronger,
    })
}

#[derive(Serialize)]
struct RecordOut<'a> {
    conj: &'a str,
    p: u64,
    case: Option<usize>,
    status: &'static str,
    lhs: Option<u64>,
    rhs: Option<u64>,
    #[serde(rename = "mod")]
    modulus: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    note: Option<&'a str>,
}

impl<'a> From<&'a CaseResult> for RecordOut<'a> {
    fn from(r: &'a CaseResult) -> Self {
        Self {
            conj: &r.conj,
            p: r.p,
            case: r.case,
            status: r.status.as_str(),
            lhs: r.lhs,
            rhs: r.rhs,
            modulus: r.modulus,
            note: r.note.as_deref(),
        }
    }
}

#[derive(Serialize)]
struct SummaryOut<'a> {
    conj: &'a str,
    #[serde(flatten)]
    counts: Counts,
}

#[derive(Serialize)]
struct MetaOut<'a> {
    registry_sha256: &'a str,
    lo: u64,
    hi: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    timestamp: Option<&'a str>,
    records: usize,
    totals: Counts,
    summary: Vec<SummaryOut<'a>>,
}

#[derive(Serialize)]
struct MetaLine<'a> {
    meta: MetaOut<'a>,
}

#[derive(Serialize)]
struct StrongerLine<'a> {
    stronger: RecordOut<'a>,
}

fn emit_jsonl(report: &Report) -> Vec<u8> {
    let summary = report.summary();
    let meta = MetaLine {
        meta: MetaOut {
            registry_sha256: &report.registry_sha256,
            lo: report.lo,
            hi: report.hi,
            timestamp: report.timestamp.as_deref(),
            records: report.records.len(),
            totals: report.totals(),
            summary: summary
                .iter()
                .map(|(id, counts)| SummaryOut {
                    conj: id,
                    counts: *counts,
                })
                .collect(),
        },
    };
    let mut out = serde_json::to_vec(&meta).expect("serializable");
    out.push(b'\n');
    for r in &report.records {
        serde_json::to_writer(&mut out, &RecordOut::from(r)).expect("serializable");
        out.push(b'\n');
    }
    for r in &report.stronger {
        serde_json::to_writer(&mut out, &StrongerLine { stronger: r.into() }).expect("serializable");
        out.push(b'\n');
    }
    out
}

fn emit_csv(report: &Report) -> Vec<u8> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["conj", "p", "case", "status", "lhs", "rhs", "mod", "note"])
        .expect("in-memory write");
    let opt = |v: Option<u64>| v.map(|v| v.to_string()).unwrap_or_default();
    for r in &report.records {
        w.write_record([
            r.conj.clone(),
            r.p.to_string(),
            r.case.map(|c| c.to_string()).unwrap_or_default(),
            r.status.as_str().to_string(),
            opt(r.lhs),
            opt(r.rhs),
            r.modulus.to_string(),
            r.note.clone().unwrap_or_default(),
        ])
        .expect("in-memory write");
    }
    w.into_inner().expect("in-memory flush")
}

fn emit_table(report: &Report) -> Vec<u8> {
    let mut s = String::new();
    let _ = writeln!(s, "registry sha256 {}", report.registry_sha256);
    let _ = writeln!(s, "primes {}..{}", report.lo, report.hi);
    if let Some(t) = &report.timestamp {
        let _ = writeln!(s, "timestamp {t}");
    }
    let _ = writeln!(
        s,
        "{:<12} {:>7} {:>6} {:>7} {:>9} {:>8} {:>7}",
        "conjecture", "pass", "fail", "nocase", "ambiguous", "skipped", "errors"
    );
    let mut rows = report.summary();
    rows.push(("TOTAL".into(), report.totals()));
    for (id, c) in rows {
        let _ = writeln!(
            s,
            "{:<12} {:>7} {:>6} {:>7} {:>9} {:>8} {:>7}",
            id, c.pass, c.fail, c.nocase, c.ambiguous, c.skipped, c.engine_error
        );
    }
    let bad: Vec<_> = report
        .records
        .iter()
        .filter(|r| {
            matches!(
                r.status,
                CaseStatus::Fail | CaseStatus::Ambiguous | CaseStatus::EngineError
            )
        })
        .collect();
    if !bad.is_empty() {
        let _ = writeln!(s, "\nproblems:");
        for r in bad {
            let case = r.case.map(|c| c.to_string()).unwrap_or_else(|| "-".into());
            let _ = writeln!(
                s,
                "  {} p={} case {} {} lhs={} rhs={} mod {}{}",
                r.conj,
                r.p,
                case,
                r.status,
                r.lhs.map(|v| v.to_string()).unwrap_or_else(|| "-".into()),
                r.rhs.map(|v| v.to_string()).unwrap_or_else(|| "-".into()),
                r.modulus,
                r.note.as_ref().map(|n| format!(" ({n})")).unwrap_or_default()
            );
        }
    }
    if !report.stronger.is_empty() {
        let pass = report.stronger.iter().filter(|r| r.status == CaseStatus::Pass).count();
        let _ = writeln!(
            s,
            "\nstronger (mod-p cases tested mod p^2): {pass} of {} hold",
            report.stronger.len()
        );
    }
    s.into_bytes()
}

pub fn emit(report: &Report, format: Format) -> Vec<u8> {
    match format {
        Format::Jsonl => emit_jsonl(report),
        Format::Csv => emit_csv(report),
        Format::Table => emit_table(report),
    }
}
