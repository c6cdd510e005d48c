use std::collections::BTreeMap;

use clap::{Parser, Subcommand, ValueEnum};
use magicfiber::charpoly::{tol_from_f64, RootEnclosure};
use magicfiber::dehn::{self, norm_ball, FaceKind};
use magicfiber::entropy::{self, min_ent};
use magicfiber::homology::{self, boundary_slopes, fiber_info, locate_cone, HClass, Slope};
use magicfiber::search::{self, SearchOptions};
use num_bigint::BigInt;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::record::{decimal, Format, OutputRecord};

#[derive(Debug, Parser)]
#[command(name = "magicfiber", version, about = "Dilatations and entropies of fibrations on the magic manifold")]
pub struct Cli {
    /// Output format.
    #[arg(long, value_enum, default_value_t = Format::Text, global = true)]
    pub format: Format,
    /// Result cache file; MAGICFIBER_CACHE takes precedence.
    #[arg(long, global = true)]
    pub cache: Option<std::path::PathBuf>,
    /// Worker threads for search and verify (default: logical cores).
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    /// Width of certified root brackets.
    #[arg(long, default_value_t = 1e-12, global = true)]
    pub tol: f64,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum TableName {
    Table1,
    Census,
    Whitehead,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Suite {
    Symmetry,
    Equivalence,
    Monotonicity,
    Whitehead,
    Lt,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Largest real root of the dilatation polynomial of a fibered class.
    Dilatation {
        #[arg(allow_negative_numbers = true)]
        x: i64,
        #[arg(allow_negative_numbers = true)]
        y: i64,
        #[arg(allow_negative_numbers = true)]
        z: i64,
    },
    /// Genus, boundary counts, prongs and slopes of the fiber.
    FiberInfo {
        #[arg(allow_negative_numbers = true)]
        x: i64,
        #[arg(allow_negative_numbers = true)]
        y: i64,
        #[arg(allow_negative_numbers = true)]
        z: i64,
    },
    /// Thurston norm ball of N(r) in filling-basis coordinates.
    NormBall {
        #[arg(long, allow_hyphen_values = true)]
        slope: String,
    },
    /// Minimal normalized entropy over a face type of N(r).
    MinEnt {
        #[arg(long, allow_hyphen_values = true)]
        slope: String,
        #[arg(long)]
        face: String,
    },
    /// Genus and normalized entropy after capping every boundary component.
    ClosedEnt {
        #[arg(allow_negative_numbers = true)]
        x: i64,
        #[arg(allow_negative_numbers = true)]
        y: i64,
        #[arg(allow_negative_numbers = true)]
        z: i64,
    },
    /// Reproduce a table.
    Table {
        #[arg(long, value_enum)]
        name: TableName,
    },
    /// Minimal dilatation over fillings of N(r) with closed fiber of the given genus.
    Search {
        #[arg(long, allow_hyphen_values = true)]
        slope: String,
        #[arg(long)]
        genus: i64,
        #[arg(long)]
        orientable: bool,
        #[arg(long)]
        require_m: bool,
    },
    /// Lanneau-Thiffeault polynomial and its six specializing classes.
    Lt { k: u64, l: u64 },
    /// Run a property suite.
    Verify {
        #[arg(long, value_enum)]
        suite: Suite,
        #[arg(long, default_value_t = 12)]
        bound: i64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Domain(String),
    #[error("verification failed: {message}")]
    Verify { message: String, records: Vec<OutputRecord> },
    #[error("I/O error: {0}")]
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Verify { .. } => 1,
            CliError::Domain(_) => 2,
            CliError::Io(_) => 3,
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e.to_string())
    }
}

fn domain<E: std::fmt::Display>(e: E) -> CliError {
    CliError::Domain(e.to_string())
}

fn parse_slope(s: &str) -> Result<Slope, CliError> {
    s.parse::<Slope>().map_err(|e| CliError::Domain(format!("invalid slope {:?}: {}", s, e)))
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Dilatation { .. } => "dilatation",
            Command::FiberInfo { .. } => "fiber-info",
            Command::NormBall { .. } => "norm-ball",
            Command::MinEnt { .. } => "min-ent",
            Command::ClosedEnt { .. } => "closed-ent",
            Command::Table { .. } => "table",
            Command::Search { .. } => "search",
            Command::Lt { .. } => "lt",
            Command::Verify { .. } => "verify",
        }
    }

    /// Canonical inputs; slopes are re-printed in normalized form.
    pub fn inputs(&self) -> Result<BTreeMap<String, String>, CliError> {
        let mut m = BTreeMap::new();
        let mut put = |k: &str, v: String| {
            m.insert(k.to_string(), v);
        };
        match self {
            Command::Dilatation { x, y, z } | Command::FiberInfo { x, y, z } | Command::ClosedEnt { x, y, z } => {
                put("class", HClass::new(*x, *y, *z).to_string());
            }
            Command::NormBall { slope } => put("slope", parse_slope(slope)?.to_string()),
            Command::MinEnt { slope, face } => {
                put("slope", parse_slope(slope)?.to_string());
                let f: FaceKind = face.parse().map_err(domain)?;
                put("face", f.to_string());
            }
            Command::Table { name } => put("name", format!("{:?}", name).to_lowercase()),
            Command::Search { slope, genus, orientable, require_m } => {
                put("slope", parse_slope(slope)?.to_string());
                put("genus", genus.to_string());
                put("orientable", orientable.to_string());
                put("require_m", require_m.to_string());
            }
            Command::Lt { k, l } => {
                put("k", k.to_string());
                put("l", l.to_string());
            }
            Command::Verify { suite, bound, seed } => {
                put("suite", format!("{:?}", suite).to_lowercase());
                put("bound", bound.to_string());
                put("seed", seed.to_string());
            }
        }
        Ok(m)
    }

    pub fn cacheable(&self) -> bool {
        !matches!(self, Command::Verify { .. })
    }
}

pub fn cache_key(cmd: &Command, inputs: &BTreeMap<String, String>, tol: f64) -> String {
    let parts: Vec<String> = inputs.iter().map(|(k, v)| format!("{}={}", k, v)).collect();
    format!("{}|{}|tol={:e}", cmd.name(), parts.join(";"), tol)
}

fn push_root(rec: &mut OutputRecord, prefix: &str, e: &RootEnclosure) {
    rec.push(prefix, decimal(e.approx), true);
    rec.push(&format!("{}_lower", prefix), e.lo.to_string(), true);
    rec.push(&format!("{}_upper", prefix), e.hi.to_string(), true);
}

pub fn execute(cmd: &Command, tol: f64) -> Result<Vec<OutputRecord>, CliError> {
    if !(tol > 0.0 && tol < 1.0) {
        return Err(CliError::Domain(format!("tolerance must lie in (0, 1), got {}", tol)));
    }
    let inputs = cmd.inputs()?;
    let name = cmd.name();
    let mut rec = OutputRecord::new(name, &inputs);
    match cmd {
        Command::Dilatation { x, y, z } => {
            let a = HClass::new(*x, *y, *z);
            let e = homology::dilatation_tol(&a, &tol_from_f64(tol)).map_err(domain)?;
            push_root(&mut rec, "lambda", &e);
            rec.push("entropy", decimal(e.log()), false);
            Ok(vec![rec])
        }
        Command::FiberInfo { x, y, z } => {
            let a = HClass::new(*x, *y, *z);
            let info = fiber_info(&a).map_err(domain)?;
            let (sa, sb, sg) = boundary_slopes(&a).map_err(domain)?;
            rec.push("cone", locate_cone(&a).name(), true)
                .push("norm", info.norm.to_string(), true)
                .push("genus", info.genus.to_string(), true)
                .push("n_alpha", info.n_alpha.to_string(), true)
                .push("n_beta", info.n_beta.to_string(), true)
                .push("n_gamma", info.n_gamma.to_string(), true)
                .push("prongs_alpha", info.prongs_alpha.to_string(), true)
                .push("prongs_beta", info.prongs_beta.to_string(), true)
                .push("prongs_gamma", info.prongs_gamma.to_string(), true)
                .push("slope_alpha", sa.to_string(), true)
                .push("slope_beta", sb.to_string(), true)
                .push("slope_gamma", sg.to_string(), true)
                .push("orientable", info.orientable.to_string(), true)
                .push("all_prongs_even", info.all_prongs_even.to_string(), true)
                .push("in_m", info.in_m.to_string(), true);
            Ok(vec![rec])
        }
        Command::NormBall { slope } => {
            let r = parse_slope(slope)?;
            let ball = norm_ball(&r).map_err(domain)?;
            let n = ball.vertices.len();
            let mut out = Vec::new();
            for (i, f) in ball.faces.iter().enumerate() {
                let (u, v) = &ball.vertices[f.from];
                let (u2, v2) = &ball.vertices[f.to % n];
                let mut rec = OutputRecord::new(name, &inputs);
                rec.push("radius", ball.radius.to_string(), true)
                    .push("face", i.to_string(), true)
                    .push("kind", f.kind.to_string(), true)
                    .push("from", format!("({},{})", u, v), true)
                    .push("to", format!("({},{})", u2, v2), true);
                out.push(rec);
            }
            Ok(out)
        }
        Command::MinEnt { slope, face } => {
            let r = parse_slope(slope)?;
            let f: FaceKind = face.parse().map_err(domain)?;
            let m = min_ent(&r, f).map_err(domain)?;
            let (wx, wy) = m.witness.to_f64();
            rec.push("min_ent", decimal(m.value), false)
                .push("witness", m.witness.to_string(), true)
                .push("witness_decimal", format!("[{},{}]", decimal(wx), decimal(wy)), false)
                .push("parameter_width", format!("{:e}", m.certified_width), false);
            Ok(vec![rec])
        }
        Command::ClosedEnt { x, y, z } => {
            let a = HClass::new(*x, *y, *z);
            let c = dehn::closed_extension(&a).map_err(domain)?;
            rec.push("genus", c.genus.to_string(), true);
            push_root(&mut rec, "lambda", &c.lambda);
            rec.push("ent", decimal(c.ent), false)
                .push("orientable", c.orientable.to_string(), true);
            Ok(vec![rec])
        }
        Command::Table { name: t } => table(*t, name, &inputs),
        Command::Search { slope, genus, orientable, require_m } => {
            let r = parse_slope(slope)?;
            let opts = SearchOptions { require_m: *require_m, orientable_only: *orientable, cap_factor: 1 };
            let s = search::min_dilatation_genus_with(&r, *genus, opts).map_err(domain)?;
            rec.push("k", s.k.to_string(), true)
                .push("l", s.l.to_string(), true)
                .push("class", s.best_class.lift.to_string(), true);
            push_root(&mut rec, "lambda", &s.lambda);
            rec.push("genus", s.genus.to_string(), true)
                .push("orientable", s.orientable.to_string(), true)
                .push("scanned", s.candidates_scanned.to_string(), true);
            Ok(vec![rec])
        }
        Command::Lt { k, l } => {
            let rep = search::lt_consistency(*k, *l).map_err(domain)?;
            let mut out = Vec::new();
            for (a, cusp, s, lam, div) in &rep.members {
                let mut rec = OutputRecord::new(name, &inputs);
                rec.push("class", a.to_string(), true)
                    .push("cusp", cusp.name(), true)
                    .push("slope", s.to_string(), true)
                    .push("lambda", decimal(lam.approx), true)
                    .push("lt_root", decimal(rep.root.approx), true)
                    .push("divides", div.to_string(), true);
                out.push(rec);
            }
            if !rep.ok() {
                return Err(CliError::Verify {
                    message: format!("f_({},{}) is inconsistent with its specializations", k, l),
                    records: out,
                });
            }
            Ok(out)
        }
        Command::Verify { suite, bound, seed } => verify(*suite, *bound, *seed, &inputs),
    }
}

fn table(t: TableName, name: &str, inputs: &BTreeMap<String, String>) -> Result<Vec<OutputRecord>, CliError> {
    let mut out = Vec::new();
    match t {
        TableName::Table1 => {
            for row in search::table1(6..=216).map_err(domain)? {
                let mut rec = OutputRecord::new(name, inputs);
                rec.push("g", row.g.to_string(), true)
                    .push("class", row.class.to_string(), true)
                    .push("lambda", decimal(row.lambda.approx), true)
                    .push("lambda_ggm1", decimal(row.lambda_ggm1.approx), true);
                out.push(rec);
            }
        }
        TableName::Census => {
            for row in search::census_entropy_table().map_err(domain)? {
                let mut rec = OutputRecord::new(name, inputs);
                rec.push("manifold", row.manifold, true)
                    .push("fiber", row.fiber(), true)
                    .push("entropy", decimal(row.entropy), true)
                    .push("normalized_entropy", decimal(row.normalized_entropy), true);
                out.push(rec);
            }
        }
        TableName::Whitehead => {
            for n in 2..=16 {
                let w = search::whitehead_minima(n).map_err(domain)?;
                let mut rec = OutputRecord::new(name, inputs);
                rec.push("n", n.to_string(), true)
                    .push("k", w.k.to_string(), true)
                    .push("l", w.l.to_string(), true)
                    .push("class", w.class.lift.to_string(), true)
                    .push("polynomial", w.polynomial.to_string(), true)
                    .push("lambda", decimal(w.lambda.approx), true)
                    .push("confirmed", w.confirmed().to_string(), true);
                out.push(rec);
            }
        }
    }
    Ok(out)
}

fn random_fibered(rng: &mut ChaCha8Rng, bound: i64) -> HClass {
    loop {
        let a = HClass::new(
            rng.gen_range(-bound..=bound),
            rng.gen_range(-bound..=bound),
            rng.gen_range(-bound..=bound),
        );
        if a.is_primitive() && locate_cone(&a) != homology::Cone::NotFibered {
            return a;
        }
    }
}

fn symmetry_check(a: &HClass) -> Result<(), String> {
    let s = homology::sigma(a).map_err(|e| e.to_string())?;
    let lam = homology::dilatation(&s).map_err(|e| e.to_string())?;
    let tol = magicfiber::charpoly::default_tol();
    let na = homology::thurston_norm(a);
    if na != homology::thurston_norm(&s) {
        return Err(format!("{}: norm differs from σ = {}", a, s));
    }
    let neg = homology::dilatation(&a.neg()).map_err(|e| e.to_string())?;
    if !entropy::roots_agree(&lam, &neg, &tol) {
        return Err(format!("{}: λ(a) = {} but λ(-a) = {}", a, lam.approx, neg.approx));
    }
    for b in homology::symmetry_orbit(&s).map_err(|e| e.to_string())? {
        let lb = homology::dilatation(&b).map_err(|e| e.to_string())?;
        if !entropy::roots_agree(&lam, &lb, &tol) || homology::thurston_norm(&b) != na {
            return Err(format!("{}: orbit member {} has λ = {}, expected {}", a, b, lb.approx, lam.approx));
        }
    }
    let info = fiber_info(a).map_err(|e| e.to_string())?;
    if info.norm != BigInt::from(2) * &info.genus - 2 + info.boundary_total() {
        return Err(format!("{}: norm {} differs from -χ of the fiber", a, info.norm));
    }
    Ok(())
}

fn verify(suite: Suite, bound: i64, seed: u64, inputs: &BTreeMap<String, String>) -> Result<Vec<OutputRecord>, CliError> {
    if bound < 2 {
        return Err(CliError::Domain(format!("bound must be at least 2, got {}", bound)));
    }
    let mut rec = OutputRecord::new("verify", inputs);
    let mut checked = 0usize;
    let mut failure: Option<String> = None;
    match suite {
        Suite::Symmetry => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            for _ in 0..100 {
                let a = random_fibered(&mut rng, bound);
                checked += 1;
                if let Err(msg) = symmetry_check(&a) {
                    failure = Some(msg);
                    break;
                }
            }
        }
        Suite::Equivalence => {
            for s in ["7/-2", "9/-2", "11/-2", "5/-3", "8/-3", "10/-3", "7/-4", "11/-4", "13/-4", "6/-5"] {
                let r = parse_slope(s)?;
                let rep = entropy::verify_entropy_equivalence(&r, 200, bound).map_err(domain)?;
                checked += rep.checked;
                if let Some(m) = rep.first_failure {
                    failure = Some(format!("{} vs {}: {}", rep.slope, rep.partner, m));
                    break;
                }
            }
        }
        Suite::Monotonicity => {
            for q in [-2i64, -3, -4, -5] {
                let ps: Vec<i64> = (1..=bound)
                    .filter(|p| num_integer::gcd(*p, q) == 1)
                    .filter(|p| dehn::is_hyperbolic_slope(&Slope::new(*p, q)))
                    .collect();
                let rep = entropy::verify_monotonicity(q, &ps).map_err(domain)?;
                checked += rep.entries.len();
                if let Some(m) = rep.first_failure {
                    failure = Some(m);
                    break;
                }
            }
        }
        Suite::Whitehead => {
            for n in 2..=bound.min(16) {
                let w = search::whitehead_minima(n).map_err(domain)?;
                checked += 1;
                if !w.confirmed() {
                    failure = Some(format!("n={}: formula class ({},{}) is not a brute-force minimizer", n, w.k, w.l));
                    break;
                }
                if w.genus != BigInt::from(1) {
                    failure = Some(format!("n={}: filled fiber has genus {}", n, w.genus));
                    break;
                }
            }
            if failure.is_none() {
                let rep = entropy::verify_whitehead_involution(bound);
                checked += rep.entries.len();
                failure = rep.first_failure;
            }
        }
        Suite::Lt => {
            for k in 2..=bound as u64 {
                for l in 1..k {
                    if num_integer::gcd(k as i64, l as i64) != 1 {
                        continue;
                    }
                    let rep = search::lt_consistency(k, l).map_err(domain)?;
                    checked += 1;
                    if !rep.ok() {
                        failure = Some(format!("f_({},{}) disagrees with its specializations", k, l));
                        break;
                    }
                }
                if failure.is_some() {
                    break;
                }
            }
        }
    }
    rec.push("checked", checked.to_string(), true)
        .push("ok", failure.is_none().to_string(), true)
        .push("counterexample", failure.clone().unwrap_or_default(), true);
    match failure {
        Some(message) => Err(CliError::Verify { message, records: vec![rec] }),
        None => Ok(vec![rec]),
    }
}
