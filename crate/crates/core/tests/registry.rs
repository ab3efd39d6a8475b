use supercong::error::ParseError;
use supercong::registry::{parse, parse_condition, parse_expr, parse_sum, Status, BUILTIN};

const SMALL: &str = r#"
conjecture "t.1" proved {
  exclude 2, 3
  sum a = SUM(k)[C(2k,k)^3 * rpow(1/64)]
  case p%4 in {3} : S(a) === 0 mod p^2
  case rep(1,4,1) : S(a) === 4*x^2 - 2*p mod p^2
}
"#;

fn err(src: &str) -> ParseError {
    parse(src).expect_err("should not parse")
}

#[test]
fn builtin_round_trips() {
    let reg = parse(BUILTIN).unwrap();
    let printed = reg.to_string();
    assert_eq!(parse(&printed).unwrap(), reg);
    assert_eq!(parse(&printed).unwrap().to_string(), printed);
}

#[test]
fn builtin_has_six_proved_entries() {
    let reg = parse(BUILTIN).unwrap();
    let proved: Vec<_> = reg
        .conjectures
        .iter()
        .filter(|c| c.status == Status::Proved)
        .map(|c| c.id.as_str())
        .collect();
    assert_eq!(proved, ["beukers", "rv.108", "rv.256", "rv.1728", "su2.catalan", "su2.mixed"]);
}

#[test]
fn builtin_ids_are_unique() {
    let reg = parse(BUILTIN).unwrap();
    let mut ids: Vec<_> = reg.conjectures.iter().map(|c| &c.id).collect();
    let n = ids.len();
    ids.sort();
    ids.dedup();
    assert_eq!(ids.len(), n);
}

#[test]
fn small_registry_fields() {
    let reg = parse(SMALL).unwrap();
    let c = &reg.conjectures[0];
    assert_eq!(c.id, "t.1");
    assert_eq!(c.excluded, [2, 3]);
    assert_eq!(c.sums.len(), 1);
    assert_eq!(c.cases.len(), 2);
    assert_eq!(c.cases[1].power, 2);
}

#[test]
fn comments_and_blank_lines_are_ignored() {
    let src = format!("# leading\n\n{SMALL}\n# trailing\n");
    assert_eq!(parse(&src).unwrap(), parse(SMALL).unwrap());
}

#[test]
fn duplicate_conjecture_is_rejected() {
    let e = err(&format!("{SMALL}{SMALL}"));
    assert!(e.message.contains("duplicate"), "{e}");
}

#[test]
fn undefined_sum_is_rejected() {
    let e = err(&SMALL.replace("S(a) === 0", "S(b) === 0"));
    assert!(e.message.contains("not defined"), "{e}");
    assert_eq!(e.line, 5);
}

#[test]
fn unbound_rep_symbol_is_rejected() {
    let src = SMALL.replace("S(a) === 0 mod", "S(a) === x^2 mod");
    assert!(parse(&src).is_err());
}

#[test]
fn modulus_exponent_is_checked() {
    let e = err(&SMALL.replace("=== 0 mod p^2", "=== 0 mod p^4"));
    assert!(e.message.contains("modulus exponent"), "{e}");
}

#[test]
fn residue_must_be_below_modulus() {
    let e = err(&SMALL.replace("p%4 in {3}", "p%4 in {5}"));
    assert!(e.message.contains("not below"), "{e}");
}

#[test]
fn unterminated_string_reports_location() {
    let e = err("conjecture \"open\n");
    assert_eq!((e.line, e.col), (1, 12));
}

#[test]
fn unknown_factor_is_rejected() {
    assert!(parse_sum("sum a = SUM(k)[C(2k,k) * zeta(3)]").is_err());
    assert!(parse_sum("sum a = SUM(k)[C(2k,k) * inv(k^2)]").is_err());
    assert!(parse_sum("sum a = SUM(k)[C(2k,k) * rpow(0)]").is_err());
}

#[test]
fn standalone_pieces_round_trip() {
    let s = parse_sum("sum a = leg(-3) * SUM(k)[C(2k,k) * C(3k,k) * C(6k,3k) * rpow(1/1728) * inv((2k-1)^2)]").unwrap();
    assert_eq!(parse_sum(&s.to_string()).unwrap(), s);
    let c = parse_condition("p%8 in {1,3} && rep(1,2,1)").unwrap();
    assert_eq!(parse_condition(&c.to_string()).unwrap(), c);
    let e = parse_expr("-11/4 * p^2 * FB(3*[p/7],[p/7])^-2 + 4*x^2 - p/2").unwrap();
    assert_eq!(parse_expr(&e.to_string()).unwrap(), e);
}

#[test]
fn suspect_reading_round_trips() {
    let src = SMALL.replace("4*x^2 - 2*p mod p^2", "4*x^2 - 2*p mod p^2 suspect 4*x^2 + 2*p");
    let reg = parse(&src).unwrap();
    assert!(reg.conjectures[0].cases[1].suspect.is_some());
    assert_eq!(parse(&reg.to_string()).unwrap(), reg);
}
