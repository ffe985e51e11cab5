use std::fmt;
use std::fs;
use std::path::Path;
use std::time::Instant;

use num_traits::ToPrimitive;
use serde_json::{json, Value};

use extremal_core::arith::{format_rational, parse_rational, Rational};
use extremal_core::coupling::{is_graphic, strip_zero_mass, validate, CouplingError};
use extremal_core::dyadic::{
    eval_fp, ks_uniform, sample_transformed_pairs, samples_to_csv, truncated_coupling, DyadicError, DyadicSpec,
    SampleConfig,
};
use extremal_core::enumeration::{
    check_support_bounds, check_support_uniqueness, enumerate_extreme, is_vertex_by_constraints, verify_birkhoff,
    EnumerationError, Vertex, VertexSet,
};
use extremal_core::extremality::test_extreme;
use extremal_core::io::{self, Instance, InstanceFile};
use extremal_core::symmetry::{close_group, decompose_orbits, OrbitDecomposition, SymmetryError};

pub enum Output {
    Report(Value),
    Text(String),
    Nothing,
}

pub struct Outcome {
    pub output: Output,
    pub exit: u8,
}

impl Outcome {
    fn report(report: Value) -> Self {
        Self {
            output: Output::Report(report),
            exit: 0,
        }
    }
}

#[derive(Debug)]
pub enum CliError {
    Input(String),
    Budget(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Input(_) => 2,
            CliError::Budget(_) => 3,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Input(m) | CliError::Budget(m) => f.write_str(m),
        }
    }
}

impl From<SymmetryError> for CliError {
    fn from(e: SymmetryError) -> Self {
        match e {
            SymmetryError::CapExceeded { .. } => CliError::Budget(e.to_string()),
            other => CliError::Input(other.to_string()),
        }
    }
}

impl From<CouplingError> for CliError {
    fn from(e: CouplingError) -> Self {
        match e {
            CouplingError::Symmetry(s) => s.into(),
            other => CliError::Input(other.to_string()),
        }
    }
}

impl From<EnumerationError> for CliError {
    fn from(e: EnumerationError) -> Self {
        match e {
            EnumerationError::BudgetExceeded { .. } => CliError::Budget(e.to_string()),
            other => CliError::Input(other.to_string()),
        }
    }
}

impl From<DyadicError> for CliError {
    fn from(e: DyadicError) -> Self {
        match e {
            DyadicError::SizeCapExceeded { .. } => CliError::Budget(e.to_string()),
            other => CliError::Input(other.to_string()),
        }
    }
}

fn load(path: &Path) -> Result<Instance, CliError> {
    let text = fs::read_to_string(path).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?;
    InstanceFile::parse(&text)
        .and_then(|f| f.to_instance())
        .map_err(|e| CliError::Input(format!("{}: {e}", path.display())))
}

fn orbits_of(inst: &Instance, cap: usize) -> Result<(usize, OrbitDecomposition), CliError> {
    let (n1, n2) = (inst.mu1.len(), inst.mu2.len());
    let closure = close_group(n1, n2, &inst.generators, cap)?;
    Ok((closure.size(), decompose_orbits(n1, n2, &closure)?))
}

fn orbit_counts(d: &OrbitDecomposition) -> Value {
    json!({ "m1": d.m1(), "m2": d.m2(), "m12": d.m12() })
}

fn elapsed_ms(start: Instant) -> f64 {
    start.elapsed().as_secs_f64() * 1e3
}

fn parse_p(text: &str) -> Result<Rational, CliError> {
    parse_rational(text).map_err(|e| CliError::Input(format!("--p {text:?}: {e}")))
}

pub fn check(path: &Path, group_cap: usize, fail_if_not_extreme: bool) -> Result<Outcome, CliError> {
    let start = Instant::now();
    let inst = load(path)?;
    let omega = inst
        .omega
        .clone()
        .ok_or_else(|| CliError::Input(format!("{}: instance has no omega", path.display())))?;
    let (group_order, orbits) = orbits_of(&inst, group_cap)?;
    strip_zero_mass(&inst.mu1, &inst.mu2, &inst.generators)?;
    let mut report = json!({
        "command": "check",
        "instance": path.display().to_string(),
        "instance_digest": inst.digest(),
        "group_order": group_order,
        "orbits": orbit_counts(&orbits),
    });
    let coupling = match validate(omega, &inst.mu1, &inst.mu2, &orbits) {
        Ok(c) => c,
        Err(v) => {
            report["valid"] = json!(false);
            report["violations"] = json!(v.0.iter().map(ToString::to_string).collect::<Vec<_>>());
            report["timing_ms"] = json!(elapsed_ms(start));
            return Ok(Outcome {
                output: Output::Report(report),
                exit: 2,
            });
        }
    };
    let verdict = test_extreme(&coupling, &orbits).map_err(|e| CliError::Input(e.to_string()))?;
    let verified = verdict
        .certificate
        .as_ref()
        .map(|c| c.verify(&coupling, &orbits).is_ok());
    report["valid"] = json!(true);
    report["violations"] = json!([]);
    report["graphic"] = io::graphic_json(&is_graphic(&coupling));
    report["verdict"] = io::verdict_json(&verdict, verified);
    report["oracle_agrees"] = json!(is_vertex_by_constraints(&coupling, &orbits) == verdict.extreme);
    report["timing_ms"] = json!(elapsed_ms(start));
    Ok(Outcome {
        exit: if fail_if_not_extreme && !verdict.extreme { 1 } else { 0 },
        output: Output::Report(report),
    })
}

pub fn enumerate(path: &Path, group_cap: usize, budget: u64) -> Result<Outcome, CliError> {
    let start = Instant::now();
    let inst = load(path)?;
    let reduced = strip_zero_mass(&inst.mu1, &inst.mu2, &inst.generators)?;
    let (n1, n2) = (reduced.mu1.len(), reduced.mu2.len());
    let closure = close_group(n1, n2, &reduced.generators, group_cap)?;
    let orbits = decompose_orbits(n1, n2, &closure)?;
    let vs = enumerate_extreme(&reduced.mu1, &reduced.mu2, &orbits, budget)?;
    let bounds = check_support_bounds(&vs, &orbits);
    let uniqueness = check_support_uniqueness(&vs);

    let expanded = VertexSet {
        vertices: vs
            .vertices
            .iter()
            .map(|v| Vertex {
                coupling: reduced.reduction.expand(&v.coupling),
                ..v.clone()
            })
            .collect(),
        subsets_examined: vs.subsets_examined,
    };
    let mut report = json!({
        "command": "enumerate",
        "instance": path.display().to_string(),
        "instance_digest": inst.digest(),
        "group_order": closure.size(),
        "orbits": orbit_counts(&orbits),
        "budget": budget,
    });
    if !reduced.reduction.is_identity() {
        report["kept_points"] = json!({
            "x1": reduced.reduction.kept1(),
            "x2": reduced.reduction.kept2(),
        });
    }
    report["enumeration"] = io::vertex_set_json(&expanded);
    report["support_bounds"] = io::support_bounds_json(&bounds);
    report["support_uniqueness"] = io::support_uniqueness_json(&uniqueness);
    report["timing_ms"] = json!(elapsed_ms(start));
    Ok(Outcome::report(report))
}

pub fn birkhoff(m: usize, budget: u64) -> Result<Outcome, CliError> {
    let start = Instant::now();
    let r = verify_birkhoff(m, budget)?;
    let orbits = OrbitDecomposition::trivial(m, m);
    let mut report = json!({ "command": "birkhoff" });
    if let Value::Object(fields) = io::birkhoff_json(&r) {
        report.as_object_mut().expect("object").extend(fields);
    }
    report["support_bounds"] = io::support_bounds_json(&check_support_bounds(&r.vertices, &orbits));
    report["support_uniqueness"] = io::support_uniqueness_json(&check_support_uniqueness(&r.vertices));
    report["timing_ms"] = json!(elapsed_ms(start));
    Ok(Outcome::report(report))
}

pub fn orbits(path: &Path, group_cap: usize) -> Result<Outcome, CliError> {
    let inst = load(path)?;
    let (group_order, orbits) = orbits_of(&inst, group_cap)?;
    let mut report = json!({
        "command": "orbits",
        "instance": path.display().to_string(),
        "instance_digest": inst.digest(),
        "group_order": group_order,
    });
    if let Value::Object(fields) = io::orbits_json(&orbits) {
        report.as_object_mut().expect("object").extend(fields);
    }
    Ok(Outcome::report(report))
}

pub fn example34(p: &str, depth: usize, check: bool, out: Option<&Path>, size_cap: usize) -> Result<Outcome, CliError> {
    let spec = DyadicSpec::new(parse_p(p)?, depth)?;
    let coupling = truncated_coupling(&spec, size_cap)?;
    let inst = Instance::trivial_with_coupling(&coupling);
    let file = InstanceFile::from_instance(&inst);
    let text = file.to_json_pretty() + "\n";
    if let Some(path) = out {
        fs::write(path, &text).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?;
    }
    if !check {
        return Ok(Outcome {
            output: if out.is_some() {
                Output::Nothing
            } else {
                Output::Text(text)
            },
            exit: 0,
        });
    }
    let orbits = OrbitDecomposition::trivial(coupling.n1(), coupling.n2());
    let verdict = test_extreme(&coupling, &orbits).map_err(|e| CliError::Input(e.to_string()))?;
    Ok(Outcome::report(json!({
        "command": "example34",
        "p": format_rational(spec.p()),
        "depth": depth,
        "points": coupling.n1(),
        "instance_digest": inst.digest(),
        "graphic": io::graphic_json(&is_graphic(&coupling)),
        "verdict": io::verdict_json(&verdict, None),
        "instance": serde_json::to_value(&file).expect("json"),
    })))
}

fn parse_unit_point(text: &str) -> Result<f64, CliError> {
    if let Ok(r) = parse_rational(text) {
        return r
            .to_f64()
            .ok_or_else(|| CliError::Input(format!("--t {text:?} is not representable")));
    }
    text.trim()
        .parse::<f64>()
        .map_err(|_| CliError::Input(format!("--t {text:?} is neither a rational nor a decimal")))
}

pub fn fp_eval(p: &str, t: &str, tol: f64) -> Result<Outcome, CliError> {
    let pr = parse_p(p)?;
    let pf = pr.to_f64().unwrap_or(f64::NAN);
    let tf = parse_unit_point(t)?;
    let value = eval_fp(pf, tf, tol)?;
    Ok(Outcome::report(json!({
        "command": "fp-eval",
        "p": format_rational(&pr),
        "t": tf,
        "tol": tol,
        "value": value,
    })))
}

pub fn fp_sample(
    p: &str,
    count: usize,
    seed: u64,
    depth: usize,
    tol: f64,
    out: Option<&Path>,
) -> Result<Outcome, CliError> {
    let pr = parse_p(p)?;
    let cfg = SampleConfig {
        count,
        seed,
        sample_depth: depth,
        tol,
    };
    let samples = sample_transformed_pairs(&pr, &cfg)?;
    let csv = samples_to_csv(&samples);
    let Some(path) = out else {
        return Ok(Outcome {
            output: Output::Text(csv),
            exit: 0,
        });
    };
    fs::write(path, csv).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?;
    let xs: Vec<f64> = samples.iter().map(|s| s.xi_prime).collect();
    let ys: Vec<f64> = samples.iter().map(|s| s.eta_prime).collect();
    Ok(Outcome::report(json!({
        "command": "fp-sample",
        "p": format_rational(&pr),
        "count": count,
        "seed": seed,
        "sample_depth": depth,
        "out": path.display().to_string(),
        "ks_uniform_xi": ks_uniform(&xs),
        "ks_uniform_eta": ks_uniform(&ys),
    })))
}
