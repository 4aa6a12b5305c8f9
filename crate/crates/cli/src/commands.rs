use std::fmt;

use num_rational::Ratio;
use serde_json::{json, Value};

use dieudonne::counting::{compare_formulas, enumerate_supersingular, mass_check};
use dieudonne::deformation::{deform, tangent_frobenius};
use dieudonne::dieudonne::{a_number, classify_rank2, dual, DieudonneModule, FLattice, Rank2Class};
use dieudonne::fields::{ExtensionPolicy, Tower};
use dieudonne::isocrystal::harness::{slope_cross_check, HarnessReport};
use dieudonne::isocrystal::{decompose, end_algebra_invariant, slopes_by_matrix, slopes_by_newton_polygon, DecomposeOptions, TwistedPoly};
use dieudonne::supersingular::{build_mt, classify_parameter, mobius_orbit_check, y_locus, SurfaceKind};
use dieudonne::witt::{witt_oracle_check, OracleReport};
use dieudonne::{json as enc, parser, Error};

use crate::config::Config;
use crate::{Command, PolyInput};

#[derive(Debug)]
pub enum CliError {
    Input(String),
    Lib(Error),
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Input(s) => write!(f, "{s}"),
            CliError::Lib(e) => write!(f, "{e}"),
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::Lib(e)
    }
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Lib(Error::InsufficientPrecision { .. }) => 3,
            CliError::Lib(Error::Internal(_)) => 1,
            _ => 2,
        }
    }
}

pub struct Output {
    pub value: Value,
    /// False when a check ran but did not pass.
    pub ok: bool,
}

type Res<T> = Result<T, CliError>;

fn read_json(path: &str) -> Res<Value> {
    let text = if path == "-" {
        std::io::read_to_string(std::io::stdin()).map_err(|e| CliError::Input(format!("stdin: {e}")))?
    } else {
        std::fs::read_to_string(path).map_err(|e| CliError::Input(format!("cannot read {path}: {e}")))?
    };
    serde_json::from_str(&text).map_err(|e| CliError::Input(format!("{path}: {e}")))
}

fn precision(cfg: &Config, n: Option<u32>) -> Res<u32> {
    let n = n.unwrap_or(cfg.default_precision);
    if n < 2 {
        return Err(CliError::Input(format!("precision must be at least 2, got {n}")));
    }
    Ok(n)
}

fn load_poly(cfg: &Config, input: &PolyInput) -> Res<TwistedPoly> {
    match (&input.poly, &input.poly_json) {
        (Some(text), None) => {
            let p = input.prime.ok_or_else(|| CliError::Input("--poly needs -p".into()))?;
            let ring = cfg.tower.witt_ring(p, input.degree, precision(cfg, input.precision)?)?;
            Ok(parser::parse_poly(text, &ring)?)
        }
        (None, Some(path)) => Ok(enc::poly_from(&cfg.tower, &read_json(path)?)?),
        _ => Err(CliError::Input("give exactly one of --poly, --poly-json".into())),
    }
}

fn load_module(cfg: &Config, path: &str) -> Res<DieudonneModule> {
    Ok(DieudonneModule::new(enc::module_from(&cfg.tower, &read_json(path)?)?)?)
}

fn kind_name(k: SurfaceKind) -> &'static str {
    match k {
        SurfaceKind::Superspecial => "superspecial",
        SurfaceKind::CaseI => "case_I",
        SurfaceKind::CaseII => "case_II",
    }
}

fn oracle_json(r: &OracleReport) -> Value {
    json!({"p": r.p, "n": r.n, "trials": r.trials, "mismatches": r.mismatches, "exhaustive": r.exhaustive, "passed": r.passed()})
}

fn harness_json(p: u64, r: &HarnessReport) -> Value {
    json!({
        "p": p,
        "trials": r.trials,
        "matrix_mismatches": r.matrix_mismatches,
        "decompose_mismatches": r.decompose_mismatches,
        "certificate_failures": r.certificate_failures,
        "factor_unavailable": r.factor_unavailable,
        "blocks": r.blocks,
        "unsplit_blocks": r.unsplit_blocks,
        "power_snf_mismatches": r.power_snf_mismatches,
        "errors": r.errors,
        "passed": r.passed(),
    })
}

fn self_check(cfg: &Config, trials: usize, seed: u64) -> Res<Output> {
    let mut oracle = Vec::new();
    for (p, n) in [(2, 3), (3, 2), (5, 2)] {
        oracle.push(witt_oracle_check(p, n, 100, seed)?);
    }
    let opts = DecomposeOptions::default();
    let run = |p: u64, tower: &Tower| slope_cross_check(tower, p, 24, trials, 5, 3, seed, &opts);
    let primes = [2u64, 3, 5];
    let reports: Vec<dieudonne::Result<HarnessReport>> = if cfg.threads > 1 {
        std::thread::scope(|s| {
            let handles: Vec<_> = primes.iter().map(|&p| s.spawn(move || run(p, &Tower::new(cfg.tower.table().clone())))).collect();
            handles.into_iter().map(|h| h.join().expect("harness thread")).collect()
        })
    } else {
        primes.iter().map(|&p| run(p, &cfg.tower)).collect()
    };
    let mut harness = Vec::new();
    for (p, r) in primes.iter().zip(reports) {
        harness.push((*p, r?));
    }
    let ok = oracle.iter().all(|r| r.passed()) && harness.iter().all(|(_, r)| r.passed());
    let value = json!({
        "witt_oracle": oracle.iter().map(oracle_json).collect::<Vec<_>>(),
        "slope_cross_check": harness.iter().map(|(p, r)| harness_json(*p, r)).collect::<Vec<_>>(),
        "passed": ok,
    });
    Ok(Output { value, ok })
}

/// "s/r" taken literally, so that unreduced input is reported as such.
fn raw_fraction(text: &str) -> Res<(i64, i64)> {
    let bad = || CliError::Input(format!("slope must be s/r, got {text:?}"));
    let (s, r) = text.split_once('/').unwrap_or((text, "1"));
    Ok((s.trim().parse().map_err(|_| bad())?, r.trim().parse().map_err(|_| bad())?))
}

pub fn run(cmd: &Command, cfg: &Config) -> Res<Output> {
    let tower = &cfg.tower;
    let value = match cmd {
        Command::Slopes { matrix, poly } => match matrix {
            Some(path) => {
                if poly.poly.is_some() || poly.poly_json.is_some() {
                    return Err(CliError::Input("give either --matrix or a polynomial".into()));
                }
                let lattice = FLattice::new(enc::module_from(tower, &read_json(path)?)?)?;
                json!({"slopes": enc::slopes(&slopes_by_matrix(&lattice)?)})
            }
            None => json!({"slopes": enc::slopes(&slopes_by_newton_polygon(&load_poly(cfg, poly)?)?)}),
        },
        Command::Decompose { poly, max_degree, no_split } => {
            let p = load_poly(cfg, poly)?;
            let opts = DecomposeOptions { policy: ExtensionPolicy { max_degree: *max_degree }, split_blocks: !no_split };
            let d = decompose(tower, &p, &opts)?;
            let blocks: Vec<Value> = d
                .witness
                .iter()
                .map(|b| {
                    json!({
                        "slope": enc::rational(&b.slope),
                        "degree": b.degree,
                        "certified_precision": b.certified_precision,
                        "linear_factors": b.linear.as_ref().map(|l| l.len()),
                        "field_degree": b.field_degree,
                        "unsplit_reason": b.unsplit_reason,
                    })
                })
                .collect();
            json!({
                "summands": d.summands.iter().map(|(l, m)| json!([enc::rational(l), m])).collect::<Vec<_>>(),
                "slopes": enc::slopes(&d.slopes),
                "field_degree": d.field_used.degree(),
                "ramification": d.ramification,
                "blocks": blocks,
            })
        }
        Command::ANumber { module } => json!({"a": a_number(&load_module(cfg, module)?)}),
        Command::Dual { module } => enc::module(dual(&load_module(cfg, module)?)?.f_matrix()),
        Command::ClassifyRank2 { module } => {
            let c = classify_rank2(&load_module(cfg, module)?)?;
            json!({"class": match c { Rank2Class::OrdinaryM1 => "M1", Rank2Class::SupersingularM2 => "M2" }})
        }
        Command::Deform { base, d } => {
            let b = enc::norman_from(tower, &read_json(base)?)?;
            let dm = enc::deformation_map_from(&b, &read_json(d)?)?;
            let rel = deform(&b, &dm)?;
            let tangent = match tangent_frobenius(&b, &dm) {
                Ok(t) => enc::tangent(&t),
                Err(Error::NotSuperspecialShape(_)) => Value::Null,
                Err(e) => return Err(e.into()),
            };
            json!({"relations": enc::relations(&rel), "tangent": tangent})
        }
        Command::ClassifySurface { prime, t, degree, lattice, precision: n } => {
            let field = tower.field(*prime, *degree)?;
            let param = parser::parse_parameter(t, &field)?;
            let class = classify_parameter(tower, *prime, &param)?;
            let mut v = json!({
                "p": prime,
                "t": enc::parameter(&param),
                "kind": kind_name(class.kind),
                "lambda_size": class.lambda_size,
                "definition_degree": param.definition_degree(),
            });
            if *lattice {
                let m = build_mt(tower, *prime, &param, precision(cfg, *n)?)?;
                v["a_number"] = json!(a_number(&m.mt));
                v["lattice"] = enc::module(m.mt.f_matrix());
            }
            v
        }
        Command::MobiusCheck { prime } => {
            let r = mobius_orbit_check(tower, *prime)?;
            let ok = r.superspecial_orbit.is_some() && r.case_two_orbit.is_some() && r.classification_invariant;
            let value = json!({
                "p": r.p,
                "orbit_sizes": r.orbit_sizes,
                "superspecial_orbit": r.superspecial_orbit,
                "case_two_orbit": r.case_two_orbit,
                "classification_invariant": r.classification_invariant,
                "passed": ok,
            });
            return Ok(Output { value, ok });
        }
        Command::YLocus { prime } => {
            let y = y_locus(tower, *prime)?;
            let verification = y.verification.as_ref().map(|list| {
                list.iter()
                    .map(|e| json!({"t": enc::parameter(&e.t), "kind": kind_name(e.class.kind), "lambda_size": e.class.lambda_size, "member": e.member}))
                    .collect::<Vec<_>>()
            });
            json!({"p": y.p, "locus": y.description, "whole_line": y.whole_line, "verification": verification})
        }
        Command::CountSs { prime, compare_formulas: cmp } => {
            let c = enumerate_supersingular(tower, *prime)?;
            let mass = mass_check(&c);
            let mut v = json!({
                "p": c.p,
                "count": c.count,
                "j": c.j_invariants.iter().map(|j| json!(j.coeffs())).collect::<Vec<_>>(),
                "automorphisms": c.automorphisms,
                "mass": enc::rational(&mass.mass),
                "mass_expected": enc::rational(&mass.expected),
                "mass_holds": mass.holds,
                "criteria_agree": c.disagreements.is_empty(),
            });
            if *cmp {
                let f = compare_formulas(&c);
                v["formula_printed"] = json!(f.printed.map(|q| q.to_string()));
                v["formula_classical"] = json!(f.classical.map(|q| q.to_string()));
                v["formula_printed_matches"] = json!(f.printed_matches);
                v["formula_classical_matches"] = json!(f.classical_matches);
            }
            v
        }
        Command::Invariant { slope } => {
            let (s, r) = raw_fraction(slope)?;
            let inv = end_algebra_invariant(s, r)?;
            json!({"slope": enc::rational(&Ratio::new(s, r)), "invariant": enc::rational(&inv)})
        }
        Command::SelfCheck { trials, seed } => return self_check(cfg, *trials, *seed),
    };
    Ok(Output { value, ok: true })
}
