//! Command dispatch.

use std::path::PathBuf;

use clap::{Subcommand, ValueEnum};
use num_traits::Signed;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::json;
use taf_core::autgroup::{
    alpha_on_point, cone_violation, density_witness, density_witness_at_depth, gap_chart, out_rank,
    refactor_products, zigzag_image, DensityOutcome, ExponentVector, SearchBounds,
};
use taf_core::cantor::{Point, PointLiteral, Space, Tail};
use taf_core::matrixalg::{compose_chain, DirectSystem, EmbeddingStep, MatrixUnit, TriElement};
use taf_core::rational;
use taf_core::sampling::{random_gap_point, random_point, random_tail_class};
use taf_core::supernat::{SequenceProfile, Supernatural};
use taf_core::Q;

use crate::config::{parse_config, search_bounds_override, Config};
use crate::report::Report;
use crate::CliError;

/// Largest stage on which matrix-unit checks enumerate units.
const UNIT_CHECK_LIMIT: usize = 4096;
/// Largest number of window cylinders fed to the measure solver.
const MEASURE_LIMIT: usize = 1000;

#[derive(Debug, Clone, PartialEq, Eq, Subcommand)]
pub enum Command {
    /// Supernatural numbers, common primes and the rank d of Out.
    Analyze,
    /// Finite equivalence of the profiles against a second config.
    Compare { other: PathBuf },
    /// Runs the finite-level property suite.
    Verify {
        #[arg(long)]
        level: Option<usize>,
    },
    /// Point-level queries.
    Point {
        query: PointQuery,
        #[arg(long = "point")]
        points: Vec<String>,
        #[arg(long)]
        c: Option<String>,
    },
    /// Searches for a density witness against the scaling c.
    Witness {
        #[arg(long)]
        c: String,
        #[arg(long)]
        point: Option<String>,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum PointQuery {
    Nu,
    Gap,
    Alpha,
    Cocycle,
}

impl PointQuery {
    fn name(self) -> &'static str {
        match self {
            PointQuery::Nu => "nu",
            PointQuery::Gap => "gap",
            PointQuery::Alpha => "alpha",
            PointQuery::Cocycle => "cocycle",
        }
    }
}

impl Command {
    /// Command line echo, without the config path.
    pub fn echo(&self) -> String {
        match self {
            Command::Analyze => "analyze".into(),
            Command::Compare { other } => format!("compare {}", other.display()),
            Command::Verify { level: Some(n) } => format!("verify --level {n}"),
            Command::Verify { level: None } => "verify".into(),
            Command::Point { query, points, c } => {
                let mut s = format!("point {}", query.name());
                for p in points {
                    s.push_str(&format!(" --point {p}"));
                }
                if let Some(c) = c {
                    s.push_str(&format!(" --c {c}"));
                }
                s
            }
            Command::Witness { c, point } => match point {
                Some(p) => format!("witness --c {c} --point {p}"),
                None => format!("witness --c {c}"),
            },
        }
    }
}

pub fn load_config(path: &std::path::Path) -> Result<Config, CliError> {
    let text = std::fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.into(),
        source,
    })?;
    parse_config(&text)
}

fn parse_point(space: &Space, text: &str, report: &mut Report) -> Result<Point, CliError> {
    let lit: PointLiteral = serde_json::from_str(text)
        .map_err(|e| CliError::InvalidArgument(format!("point literal {text}: {e}")))?;
    let (point, changed) = space
        .point_from_literal(&lit)
        .map_err(|e| CliError::InvalidArgument(format!("point literal {text}: {e}")))?;
    if changed {
        report.warn(format!(
            "point literal {text} canonicalized to {}",
            serde_json::to_string(&point).expect("points serialize")
        ));
    }
    Ok(point)
}

fn parse_scaling(text: &str) -> Result<Q, CliError> {
    rational::parse(text)
        .filter(|c| c.is_positive())
        .ok_or_else(|| {
            CliError::InvalidArgument(format!("scaling {text:?} is not a positive num/den"))
        })
}

fn profile_summary(p: &SequenceProfile) -> serde_json::Value {
    json!({
        "profile": p,
        "supernatural": Supernatural::from_profile(p).to_string(),
    })
}

fn q(v: &Q) -> String {
    rational::to_string(v)
}

/// Dispatches one command against a parsed configuration.
pub fn run_command(config: &Config, command: &Command) -> Result<Report, CliError> {
    let mut report = Report::new(command.echo());
    let space = Space::new(config.r.clone(), config.s.clone());
    match command {
        Command::Analyze => analyze(&space, &mut report)?,
        Command::Compare { other } => {
            let other = load_config(other)?;
            let sup = |p: &SequenceProfile| Supernatural::from_profile(p);
            report.insert(
                "a",
                json!({"r": profile_summary(&config.r), "s": profile_summary(&config.s)}),
            );
            report.insert(
                "b",
                json!({"r": profile_summary(&other.r), "s": profile_summary(&other.s)}),
            );
            let r_eq = sup(&config.r).finitely_equivalent(&sup(&other.r));
            let s_eq = sup(&config.s).finitely_equivalent(&sup(&other.s));
            report.insert("r_finitely_equivalent", r_eq);
            report.insert("s_finitely_equivalent", s_eq);
            report.insert("both_finitely_equivalent", r_eq && s_eq);
        }
        Command::Verify { level } => {
            let level = level.unwrap_or(config.options.level);
            if level < 1 {
                return Err(CliError::InvalidArgument(
                    "--level must be at least 1".into(),
                ));
            }
            verify(config, &space, level, &mut report)?;
        }
        Command::Point { query, points, c } => {
            let points = points
                .iter()
                .map(|p| parse_point(&space, p, &mut report))
                .collect::<Result<Vec<_>, _>>()?;
            point_query(&space, *query, &points, c.as_deref(), &mut report)?;
        }
        Command::Witness { c, point } => {
            let c = parse_scaling(c)?;
            let base = match point {
                Some(p) => parse_point(&space, p, &mut report)?,
                None => Point::all_ones(),
            };
            let env = std::env::var("TAF_SEARCH_BOUND").ok();
            let bounds = search_bounds_override(config.options.search.into(), env.as_deref())?;
            witness(&space, &c, &base, bounds, &mut report)?;
        }
    }
    Ok(report)
}

fn analyze(space: &Space, report: &mut Report) -> Result<(), CliError> {
    let rank = out_rank(space.r(), space.s());
    report.insert("r", profile_summary(space.r()));
    report.insert("s", profile_summary(space.s()));
    report.insert("primes", &rank.primes);
    report.insert("d", rank.d);
    report.insert("out", format!("Out ≅ Z^{}", rank.d));
    let x_star = space.point(vec![], vec![], Tail::Max)?;
    let mut generators = Vec::new();
    for &p in &rank.primes {
        let c = ExponentVector::new([(p, -1)]);
        let image = alpha_on_point(space, &c, &x_star)?;
        let chart = gap_chart(space, &image)?;
        generators.push(json!({
            "prime": p,
            "scaling": q(&c.scaling()),
            "r_refactored": refactor_products(space.r(), p)?,
            "s_refactored": refactor_products(space.s(), p)?,
            "image_of_x_star": image,
            "chart": chart,
        }));
    }
    report.insert("generators", generators);
    Ok(())
}

fn point_query(
    space: &Space,
    query: PointQuery,
    points: &[Point],
    c: Option<&str>,
    report: &mut Report,
) -> Result<(), CliError> {
    let want = if query == PointQuery::Cocycle { 2 } else { 1 };
    if points.len() != want {
        return Err(CliError::InvalidArgument(format!(
            "point {} takes {want} --point argument(s), got {}",
            query.name(),
            points.len()
        )));
    }
    let x = &points[0];
    report.insert("point", x);
    match query {
        PointQuery::Nu => report.insert("nu", q(&space.nu(x))),
        PointQuery::Gap => {
            report.insert("nu", q(&space.nu(x)));
            report.insert("gap_point", space.is_gap_point(x));
            if space.is_gap_point(x) {
                let succ = space.gap_successor(x)?;
                report.insert("successor", &succ);
                report.insert("nu_successor", q(&space.nu(&succ)));
                report.insert("successor_in_closure", space.closure_member(&succ, x));
                report.insert("point_in_successor_closure", space.closure_member(x, &succ));
                report.insert("chart", gap_chart(space, x)?);
            }
        }
        PointQuery::Alpha => {
            let c = parse_scaling(
                c.ok_or_else(|| CliError::InvalidArgument("point alpha needs --c".into()))?,
            )?;
            let exponents = ExponentVector::from_scaling(&c)?;
            let image = alpha_on_point(space, &exponents, x)?;
            report.insert("c", q(&c));
            report.insert("exponents", &exponents);
            report.insert("nu", q(&space.nu(x)));
            report.insert("image", &image);
            report.insert("nu_image", q(&space.nu(&image)));
        }
        PointQuery::Cocycle => {
            let y = &points[1];
            report.insert("other", y);
            report.insert("cocycle", q(&space.cocycle(x, y)?));
            report.insert("in_r", space.in_r(x, y));
        }
    }
    Ok(())
}

fn witness(
    space: &Space,
    c: &Q,
    base: &Point,
    bounds: SearchBounds,
    report: &mut Report,
) -> Result<(), CliError> {
    report.insert("c", q(c));
    report.insert("base_point", base);
    report.insert("nu_base", q(&space.nu(base)));
    report.insert("bounds", bounds);
    report.insert("common_primes", out_rank(space.r(), space.s()).primes);
    let outcome = density_witness(space, c, base, bounds)?;
    report.insert("outcome", &outcome);
    let mut by_depth = Vec::new();
    for j in 1..=bounds.max_depth {
        let found = density_witness_at_depth(space, c, base, j, bounds)?;
        if let Some(w) = &found {
            report.check(
                &format!("witness_depth_{j}"),
                w.verify(space, c),
                format!("k = {}, m = {}", w.k, w.m),
            );
        }
        by_depth.push(json!({"j": j, "witness": found}));
    }
    report.insert("by_depth", by_depth);
    let cone = cone_violation(space, c, 1000)
        .map(|(v, f)| json!({"value": q(&v), "factor": q(&f), "image": q(&(f * v))}));
    report.insert("cone_violation", cone);
    if matches!(outcome, DensityOutcome::Exhausted { .. }) {
        report.warn("no witness within the search bounds");
    }
    Ok(())
}

fn verify(
    config: &Config,
    space: &Space,
    level: usize,
    report: &mut Report,
) -> Result<(), CliError> {
    let mut rng = ChaCha8Rng::seed_from_u64(config.options.seed);
    let samples = config.options.samples;
    let sys = DirectSystem::from_space(space.clone());
    report.insert("level", level);
    report.insert("samples", samples);
    report.insert("seed", config.options.seed);
    report.checks = Some(Vec::new());

    check_commutation(&sys, level, report)?;
    check_homomorphism(&sys, level, report)?;

    let mut disagreements = 0;
    let mut levels_seen = 0;
    for _ in 0..samples {
        let pair = random_tail_class(space, &mut rng, level - 1, 2);
        let start = pair[0].support().max(pair[1].support()) + 1;
        for n in start..=level.max(start) {
            levels_seen += 1;
            if sys.mu_in_r(&pair[0], &pair[1], n)? != space.in_r(&pair[0], &pair[1]) {
                disagreements += 1;
            }
        }
    }
    report.check(
        "r_oracle",
        disagreements == 0,
        format!("{samples} pairs, {levels_seen} levels, {disagreements} disagreements"),
    );

    let cylinders = sys.stage_size(level)?;
    if cylinders <= MEASURE_LIMIT {
        let m = space.unique_invariant_measure(level)?;
        let product = m
            .weights
            .iter()
            .all(|(cyl, w)| *w == space.cylinder_measure(cyl));
        report.check(
            "measure_uniqueness",
            m.solution_dimension == 1 && product,
            format!(
                "{} cylinders, {} equations, solution dimension {}",
                m.weights.len(),
                m.equations,
                m.solution_dimension
            ),
        );
    } else {
        report.warn(format!(
            "measure check skipped: {cylinders} cylinders exceed {MEASURE_LIMIT}"
        ));
    }

    let mut gap_failures = 0;
    for _ in 0..samples {
        let x = random_gap_point(space, &mut rng, level);
        let succ = space.gap_successor(&x)?;
        let mut ok = space.nu(&succ) == space.nu(&x)
            && !space.closure_member(&succ, &x)
            && space.closure_member(&x, &succ);
        let mut probes: Vec<Point> = (0..10)
            .map(|_| random_point(space, &mut rng, level + 1, level + 1, None))
            .collect();
        probes.push(x.clone());
        probes.push(succ.clone());
        ok &= probes
            .iter()
            .all(|z| space.closure_member(z, &succ) == (space.closure_member(z, &x) || *z == succ));
        if !ok {
            gap_failures += 1;
        }
    }
    report.check(
        "gap_laws",
        gap_failures == 0,
        format!("{samples} gap points, {gap_failures} failures"),
    );

    let mut cocycle_failures = 0;
    for _ in 0..samples {
        let t = random_tail_class(space, &mut rng, level, 3);
        let dxy = space.cocycle(&t[0], &t[1])?;
        let additive = dxy == space.cocycle(&t[0], &t[2])? + space.cocycle(&t[2], &t[1])?;
        if !additive || space.in_r(&t[0], &t[1]) == dxy.is_negative() {
            cocycle_failures += 1;
        }
    }
    report.check(
        "cocycle",
        cocycle_failures == 0,
        format!("{samples} triples, {cocycle_failures} failures"),
    );

    let mut round_trip_failures = 0;
    for _ in 0..samples {
        let x = random_point(space, &mut rng, level, level, None);
        if !space.value_to_points(&space.nu(&x))?.contains(&x) {
            round_trip_failures += 1;
        }
    }
    report.check(
        "value_round_trip",
        round_trip_failures == 0,
        format!("{samples} points, {round_trip_failures} failures"),
    );

    let primes = out_rank(space.r(), space.s()).primes;
    if primes.is_empty() {
        report.warn("zig-zag and scaling checks skipped: no common infinite primes");
    }
    for &p in &primes {
        check_scaling(space, p, level, samples, &mut rng, report)?;
        check_zigzag(config, p, level, samples, &mut rng, report)?;
    }
    Ok(())
}

fn check_commutation(
    sys: &DirectSystem,
    level: usize,
    report: &mut Report,
) -> Result<(), CliError> {
    let space = sys.space();
    let mut units = 0;
    let mut mismatches = 0;
    for k in 1..=level {
        let n = sys.stage_size(k - 1)?;
        let (r, s) = (space.r().term(k) as usize, space.s().term(k) as usize);
        if n * r * s > UNIT_CHECK_LIMIT {
            report.warn(format!(
                "commutation at stage {k} skipped: size {}",
                n * r * s
            ));
            continue;
        }
        let rs = [
            EmbeddingStep::refinement(r, n),
            EmbeddingStep::standard(s, n * r),
        ];
        let sr = [
            EmbeddingStep::standard(s, n),
            EmbeddingStep::refinement(r, n * s),
        ];
        for e in MatrixUnit::all(n) {
            units += 1;
            if compose_chain(&rs, e)? != compose_chain(&sr, e)? {
                mismatches += 1;
            }
        }
    }
    report.check(
        "commutation",
        mismatches == 0,
        format!("{units} units, {mismatches} mismatches"),
    );
    Ok(())
}

fn check_homomorphism(
    sys: &DirectSystem,
    level: usize,
    report: &mut Report,
) -> Result<(), CliError> {
    let mut products = 0;
    let mut failures = 0;
    for step in sys.steps(level)? {
        let n = step.source_size;
        if n > 32 {
            report.warn(format!("homomorphism check skipped for {step}"));
            continue;
        }
        let image = |i, j| step.apply_unit(MatrixUnit::new(i, j, n)?);
        for i in 1..=n {
            for j in i..=n {
                let ij = image(i, j)?;
                for k in j..=n {
                    products += 1;
                    if ij.mul(&image(j, k)?)? != image(i, k)? {
                        failures += 1;
                    }
                }
            }
        }
        if step.apply(&TriElement::identity(n))? != TriElement::identity(step.target_size()) {
            failures += 1;
        }
    }
    report.check(
        "homomorphism",
        failures == 0,
        format!("{products} products, {failures} failures"),
    );
    Ok(())
}

fn check_scaling(
    space: &Space,
    p: u64,
    level: usize,
    samples: usize,
    rng: &mut ChaCha8Rng,
    report: &mut Report,
) -> Result<(), CliError> {
    let mut failures = 0;
    for a in [-1, 1] {
        let c = ExponentVector::new([(p, a)]);
        for _ in 0..samples {
            let x = random_point(space, rng, level, level, None);
            let y = alpha_on_point(space, &c, &x)?;
            if space.nu(&y) != c.scaling() * space.nu(&x) || y.tail() != x.tail() {
                failures += 1;
            }
        }
    }
    report.check(
        &format!("nu_scaling_{p}"),
        failures == 0,
        format!("{} points, {failures} failures", 2 * samples),
    );
    Ok(())
}

fn check_zigzag(
    config: &Config,
    p: u64,
    level: usize,
    samples: usize,
    rng: &mut ChaCha8Rng,
    report: &mut Report,
) -> Result<(), CliError> {
    let horizon = level + 1 + config.r.preamble().len() + config.r.cycle().len();
    let aligned = |r: &SequenceProfile| (level.max(2)..=horizon).find(|&n| r.term(n + 1) == p);
    let (r, at) = match aligned(&config.r) {
        Some(at) => (config.r.clone(), at),
        None => {
            let r = refactor_products(&config.r, p)?;
            let at = aligned(&r).expect("refactored profile has p at every odd index");
            report.warn(format!("zig-zag for {p} checked on refactored r = {r}"));
            (r, at)
        }
    };
    let sys = DirectSystem::new(r, config.s.clone());
    let space = sys.space().clone();
    let c = ExponentVector::new([(p, -1)]);
    let mut failures = 0;
    for _ in 0..samples {
        let x = random_point(&space, rng, at - 1, at - 1, Some(Tail::Ones));
        if zigzag_image(p, &sys, &x, at)? != alpha_on_point(&space, &c, &x)? {
            failures += 1;
        }
    }
    report.check(
        &format!("zigzag_vs_alpha_{p}"),
        failures == 0,
        format!("level {at}, {samples} points, {failures} failures"),
    );
    Ok(())
}
