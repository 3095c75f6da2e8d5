//! Seeded batteries. Every instance becomes a serializable [`Check`]; failing
//! checks are written out and re-evaluated by `spreadlab replay`.

use num_rational::BigRational;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use spreadlab_core::discrepancy::{DiMethod, ENUMERATION_LIMIT};
use spreadlab_core::exact::{integer, rational, Exact};
use spreadlab_core::field::{assembled_ratio_constant, connection_ratio_constant};
use spreadlab_core::io::{instance_doc, InstanceDoc};
use spreadlab_core::laczkovich::{
    claim_check, laczkovich_pipeline, random_test_set, rho_analytic_perturbed_lattice, IntBox, TestSet,
};
use spreadlab_core::measure::{generate_instance, lebesgue_atoms, InstanceSpec};
use spreadlab_core::potential::sup_bound_constant;
use spreadlab_core::transport::BRUTE_FORCE_LIMIT;
use spreadlab_core::{
    assemble_transport_field, bottleneck_distance, brute_force_bottleneck, corollary1_bound,
    corollary2_bound, discrepancy_distance_with, discrepancy_vs_lebesgue, poisson_connect, ra, ra_tilde,
    AtomicMeasure, Coupling, Domain, Grid, GridMeasure,
};

use crate::report::{num, usage, CliResult, PlotData, Table};
use crate::SuiteName;

/// Relative spread allowed across the scaling family.
pub const STABILITY: f64 = 0.2;
pub const SCALES: [i64; 3] = [1, 2, 4];

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoxDoc {
    pub lo: Vec<i64>,
    pub hi: Vec<i64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TestSetDoc {
    pub dim: usize,
    pub points: Vec<Vec<Exact>>,
    pub boxes: Vec<BoxDoc>,
}

impl TestSetDoc {
    pub fn from_set(v: &TestSet) -> Self {
        TestSetDoc {
            dim: v.dim,
            points: v.points.iter().map(|p| p.iter().cloned().map(Exact).collect()).collect(),
            boxes: v.boxes.iter().map(|b| BoxDoc { lo: b.lo.clone(), hi: b.hi.clone() }).collect(),
        }
    }

    fn to_set(&self) -> CliResult<TestSet> {
        Ok(TestSet {
            dim: self.dim,
            points: self.points.iter().map(|p| p.iter().map(|e| e.0.clone()).collect()).collect(),
            boxes: self
                .boxes
                .iter()
                .map(|b| IntBox::new(b.lo.clone(), b.hi.clone()))
                .collect::<spreadlab_core::Result<_>>()?,
        })
    }
}

/// One self-contained, replayable check.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "check", rename_all = "snake_case")]
pub enum Check {
    /// `Tra = Di`, cross-checked against both search strategies and, for
    /// small unit-mass instances, permutation enumeration.
    Duality { a: InstanceDoc, b: InstanceDoc },
    /// Both boundary inequalities for the `A`, `B` built from `v`.
    Claim { m: u64, v: TestSetDoc },
    /// `D(ν) ≤ C(d) ρ` with the inequality chain replayed on seeded sets.
    Pipeline {
        instance: InstanceDoc,
        rho: Exact,
        pitch: Exact,
        sets_seed: u64,
        sets: usize,
    },
    /// `R̃a / Tra` and `Tra / Ra` ceilings and their scale stability.
    Theorem2 { instance: InstanceDoc },
    /// `Tra ≤ K √‖u‖∞`, the ordering of the two bounds, and the mollifier chain.
    Potential { instance: InstanceDoc },
}

/// Result of evaluating a check: pass flag, CSV row, plot points.
#[derive(Clone, Debug, PartialEq)]
pub struct Evaluation {
    pub pass: bool,
    pub row: Vec<String>,
    pub plot: Vec<(String, f64, f64)>,
}

impl Check {
    pub fn table_name(&self) -> &'static str {
        match self {
            Check::Duality { .. } => "duality",
            Check::Claim { .. } => "claim",
            Check::Pipeline { .. } => "pipeline",
            Check::Theorem2 { .. } => "theorem2",
            Check::Potential { .. } => "potentials",
        }
    }

    pub fn header(&self) -> &'static [&'static str] {
        match self {
            Check::Duality { .. } => &["n", "tra", "di", "gap"],
            Check::Claim { .. } => &["instance", "dim", "m", "lhs_a", "lhs_b", "rhs", "pass"],
            Check::Pipeline { .. } => &["instance", "rho", "m", "bound", "dvl_lower", "dvl_upper", "chains_hold", "pass"],
            Check::Theorem2 { .. } => &["instance", "tra", "ra_lb_field", "ra_ub_field", "ratio_lo", "ratio_hi"],
            Check::Potential { .. } => &["instance", "dim", "tra", "sup_u", "bound1", "bound2", "r_star2", "ratio", "chain"],
        }
    }

    pub fn evaluate(&self, index: usize) -> CliResult<Evaluation> {
        match self {
            Check::Duality { a, b } => duality(a, b),
            Check::Claim { m, v } => {
                let set = v.to_set()?;
                let r = claim_check(&set, *m)?;
                Ok(Evaluation {
                    pass: r.pass,
                    row: vec![
                        index.to_string(),
                        set.dim.to_string(),
                        m.to_string(),
                        r.lhs_a.to_string(),
                        r.lhs_b.to_string(),
                        Exact(r.rhs).to_string(),
                        r.pass.to_string(),
                    ],
                    plot: Vec::new(),
                })
            }
            Check::Pipeline {
                instance,
                rho,
                pitch,
                sets_seed,
                sets,
            } => {
                let nu = instance.clone().into_instance()?.measure;
                let mut rng = ChaCha8Rng::seed_from_u64(*sets_seed);
                let m = spreadlab_core::laczkovich::cube_edge(&rho.0, nu.dim())?;
                let tests: Vec<TestSet> = (0..*sets).map(|_| random_test_set(nu.dim(), m, &mut rng)).collect();
                let p = laczkovich_pipeline(&nu, &rho.0, &tests)?;
                let dvl = discrepancy_vs_lebesgue(&nu, &pitch.0)?;
                let chains = p.all_hold();
                let pass = chains && dvl.lower <= p.bound;
                Ok(Evaluation {
                    pass,
                    row: vec![
                        index.to_string(),
                        rho.to_string(),
                        p.m.to_string(),
                        num(p.bound),
                        num(dvl.lower),
                        num(dvl.upper),
                        chains.to_string(),
                        pass.to_string(),
                    ],
                    plot: vec![("dvl_vs_bound".into(), p.bound, dvl.value.value())],
                })
            }
            Check::Theorem2 { instance } => theorem2(index, instance),
            Check::Potential { instance } => potential(index, instance),
        }
    }
}

fn duality(a: &InstanceDoc, b: &InstanceDoc) -> CliResult<Evaluation> {
    let a = a.clone().into_instance()?.measure;
    let b = b.clone().into_instance()?.measure;
    let tra = bottleneck_distance(&a, &b)?.value;
    let di = discrepancy_distance_with(&a, &b, DiMethod::Cut)?.value;
    let mut pass = tra == di;
    if a.len().max(b.len()) <= ENUMERATION_LIMIT {
        pass &= discrepancy_distance_with(&a, &b, DiMethod::Enumeration)?.value == tra;
    }
    if a.has_unit_masses() && b.has_unit_masses() && a.len() == b.len() && a.len() <= BRUTE_FORCE_LIMIT {
        pass &= brute_force_bottleneck(&a, &b)? == tra;
    }
    Ok(Evaluation {
        pass,
        row: vec![
            a.len().to_string(),
            num(tra.value()),
            num(di.value()),
            num((tra.value() - di.value()).abs()),
        ],
        plot: Vec::new(),
    })
}

/// `ν` and the Lebesgue measure atomized at pitch 1/2, scaled by `t`, with
/// `Tra`, its coupling and a grid of pitch at most `Tra / 8`.
struct Scaled {
    nu: AtomicMeasure,
    tra: f64,
    coupling: Coupling,
    grid: Grid,
}

fn scaled_family(nu: &AtomicMeasure) -> CliResult<Vec<Scaled>> {
    let lebesgue = lebesgue_atoms(nu.domain(), &rational(1, 2))?;
    let base = bottleneck_distance(nu, &lebesgue)?.value.value();
    if base == 0.0 {
        return Err(usage("instance coincides with the atomized Lebesgue measure"));
    }
    let n = ((8.0 * nu.domain().side_f64() / base).ceil() as usize).next_power_of_two();
    SCALES
        .iter()
        .map(|&t| {
            let tq = integer(t);
            let nu_t = nu.scaled_density(&tq)?;
            let b = bottleneck_distance(&nu_t, &lebesgue.scaled_density(&tq)?)?;
            Ok(Scaled {
                grid: Grid::cubic(nu_t.domain().clone(), n)?,
                tra: b.value.value(),
                coupling: b.witness,
                nu: nu_t,
            })
        })
        .collect()
}

fn stable(values: &[f64]) -> bool {
    values.iter().all(|v| (v / values[0] - 1.0).abs() <= STABILITY)
}

fn theorem2(index: usize, instance: &InstanceDoc) -> CliResult<Evaluation> {
    let nu = instance.clone().into_instance()?.measure;
    let d = nu.dim();
    let mut plot = Vec::new();
    let (mut lo, mut hi) = (Vec::new(), Vec::new());
    let mut first = None;
    for (s, t) in scaled_family(&nu)?.iter().zip(SCALES) {
        let v = assemble_transport_field(&s.coupling, s.tra, &s.grid)?;
        let ra_lb = ra_tilde(&v)?.value;
        let connection = poisson_connect(&GridMeasure::deposit(&s.nu, &s.grid)?)?;
        let ra_ub = ra(&connection.field)?.value;
        lo.push(ra_lb / s.tra);
        hi.push(s.tra / ra_ub);
        plot.push((format!("tra_vs_scale_d{d}"), t as f64, s.tra));
        plot.push((format!("ratio_lo_vs_scale_d{d}"), t as f64, ra_lb / s.tra));
        plot.push((format!("ratio_hi_vs_scale_d{d}"), t as f64, s.tra / ra_ub));
        first.get_or_insert((s.tra, ra_lb, ra_ub));
    }
    let (tra, ra_lb, ra_ub) = first.expect("three scales");
    let pass = lo.iter().all(|&x| x <= assembled_ratio_constant(d))
        && hi.iter().all(|&x| x <= connection_ratio_constant(d))
        && stable(&lo)
        && stable(&hi);
    Ok(Evaluation {
        pass,
        row: vec![
            index.to_string(),
            num(tra),
            num(ra_lb),
            num(ra_ub),
            num(lo[0]),
            num(hi[0]),
        ],
        plot,
    })
}

fn potential(index: usize, instance: &InstanceDoc) -> CliResult<Evaluation> {
    let nu = instance.clone().into_instance()?.measure;
    let d = nu.dim();
    let mut ratios = Vec::new();
    let mut plot = Vec::new();
    let mut pass = true;
    let mut row = None;
    for s in scaled_family(&nu)? {
        let u = poisson_connect(&GridMeasure::deposit(&s.nu, &s.grid)?)?.potential;
        let b1 = corollary1_bound(&u);
        let b2 = corollary2_bound(&u)?;
        let ratio = s.tra / u.sup_norm().sqrt();
        pass &= s.tra <= b1.bound && b2.bound <= b1.bound && b2.chain_holds && ratio <= sup_bound_constant(d);
        ratios.push(ratio);
        plot.push((format!("bound1_vs_tra_d{d}"), s.tra, b1.bound));
        plot.push((format!("bound2_vs_tra_d{d}"), s.tra, b2.bound));
        row.get_or_insert(vec![
            index.to_string(),
            d.to_string(),
            num(s.tra),
            num(u.sup_norm()),
            num(b1.bound),
            num(b2.bound),
            num(b2.r_star),
            num(ratio),
            b2.chain_holds.to_string(),
        ]);
    }
    pass &= stable(&ratios);
    Ok(Evaluation {
        pass,
        row: row.expect("three scales"),
        plot,
    })
}

/// Tables, plot data and failures of one run.
#[derive(Debug, Default)]
pub struct SuiteReport {
    pub tables: Vec<(&'static str, Table)>,
    pub plot: PlotData,
    pub failures: Vec<Check>,
    pub total: usize,
}

impl SuiteReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

/// Inclusive `lo..hi` (or a single number).
pub fn parse_sizes(text: &str) -> CliResult<(usize, usize)> {
    let parse = |s: &str| {
        s.trim()
            .parse::<usize>()
            .map_err(|_| usage(format!("invalid size range `{text}`")))
    };
    let (lo, hi) = match text.split_once("..") {
        Some((a, b)) => (parse(a)?, parse(b.trim_start_matches('='))?),
        None => {
            let n = parse(text)?;
            (n, n)
        }
    };
    if lo == 0 || lo > hi {
        return Err(usage(format!("invalid size range `{text}`")));
    }
    Ok((lo, hi))
}

fn sub_seed(seed: u64, parts: &[u64]) -> u64 {
    parts
        .iter()
        .fold(seed ^ 0x5eed_0000, |acc, &p| acc.wrapping_mul(0x9E37_79B9_7F4A_7C15).wrapping_add(p + 1))
}

fn unit_atoms(domain: &Domain, n: usize, rng: &mut ChaCha8Rng) -> CliResult<AtomicMeasure> {
    let steps: i64 = 16;
    let points = (0..n)
        .map(|_| (0..domain.dim()).map(|_| rational(rng.random_range(0..steps), 8)).collect())
        .collect();
    Ok(AtomicMeasure::unit_masses(domain.clone(), points)?)
}

fn duality_checks(seed: u64, sizes: (usize, usize), count: usize) -> CliResult<Vec<Check>> {
    let mut checks = Vec::new();
    for n in sizes.0..=sizes.1 {
        for dim in 1..=3usize {
            let domain = Domain::torus(dim, integer(2))?;
            for k in 0..count {
                let mut rng = ChaCha8Rng::seed_from_u64(sub_seed(seed, &[1, n as u64, dim as u64, k as u64]));
                let a = unit_atoms(&domain, n, &mut rng)?;
                let b = unit_atoms(&domain, n, &mut rng)?;
                checks.push(Check::Duality {
                    a: instance_doc(&a, None),
                    b: instance_doc(&b, None),
                });
            }
        }
    }
    Ok(checks)
}

fn lattice(dim: usize, side: i64, delta: BigRational, seed: u64) -> CliResult<AtomicMeasure> {
    Ok(generate_instance(
        &InstanceSpec::PerturbedLattice {
            dim,
            side: integer(side),
            delta,
        },
        seed,
    )?)
}

fn field_instances(seed: u64, count: usize, tag: u64) -> CliResult<Vec<InstanceDoc>> {
    let mut out = Vec::new();
    for dim in 1..=3usize {
        let side = if dim == 3 { 2 } else { 4 };
        for k in 0..count {
            let nu = lattice(dim, side, rational(2, 5), sub_seed(seed, &[tag, dim as u64, k as u64]))?;
            out.push(instance_doc(&nu, None));
        }
    }
    Ok(out)
}

fn laczkovich_checks(seed: u64, count: usize, pitch: &BigRational) -> CliResult<Vec<Check>> {
    let mut checks = Vec::new();
    for dim in [2usize, 3] {
        for m in [3u64, 5, 7] {
            let mut rng = ChaCha8Rng::seed_from_u64(sub_seed(seed, &[3, dim as u64, m]));
            for _ in 0..count {
                let v = random_test_set(dim, m, &mut rng);
                checks.push(Check::Claim { m, v: TestSetDoc::from_set(&v) });
            }
        }
    }
    for (k, delta) in [rational(1, 10), rational(2, 10), rational(4, 10)].into_iter().enumerate() {
        let rho = rho_analytic_perturbed_lattice(2, spreadlab_core::exact::to_f64(&delta))?;
        let nu = lattice(2, 16, delta, sub_seed(seed, &[4, k as u64]))?;
        checks.push(Check::Pipeline {
            instance: instance_doc(&nu, None),
            rho: Exact(BigRational::from_float(rho).expect("finite")),
            pitch: Exact(pitch.clone()),
            sets_seed: sub_seed(seed, &[5, k as u64]),
            sets: 20,
        });
    }
    Ok(checks)
}

/// Builds the checks of a suite.
pub fn build(name: SuiteName, seed: u64, sizes: (usize, usize), count: usize, pitch: &BigRational) -> CliResult<Vec<Check>> {
    Ok(match name {
        SuiteName::Duality => duality_checks(seed, sizes, count)?,
        SuiteName::Theorem2 => field_instances(seed, count, 2)?
            .into_iter()
            .map(|instance| Check::Theorem2 { instance })
            .collect(),
        SuiteName::Potentials => field_instances(seed, count, 2)?
            .into_iter()
            .map(|instance| Check::Potential { instance })
            .collect(),
        SuiteName::Laczkovich => laczkovich_checks(seed, count, pitch)?,
        SuiteName::All => {
            let mut all = Vec::new();
            for s in [SuiteName::Duality, SuiteName::Theorem2, SuiteName::Laczkovich, SuiteName::Potentials] {
                all.extend(build(s, seed, sizes, count, pitch)?);
            }
            all
        }
    })
}

/// Evaluates checks concurrently; tables keep the input order.
pub fn run(checks: &[Check]) -> CliResult<SuiteReport> {
    let evaluations: Vec<CliResult<Evaluation>> = checks
        .par_iter()
        .enumerate()
        .map(|(i, c)| c.evaluate(i))
        .collect();
    let mut report = SuiteReport::default();
    for (check, evaluation) in checks.iter().zip(evaluations) {
        let e = evaluation?;
        let name = check.table_name();
        let position = match report.tables.iter().position(|(n, _)| *n == name) {
            Some(p) => p,
            None => {
                report.tables.push((name, Table::new(check.header())));
                report.tables.len() - 1
            }
        };
        report.tables[position].1.rows.push(e.row);
        report.plot.points.extend(e.plot);
        report.total += 1;
        if !e.pass {
            report.failures.push(check.clone());
        }
    }
    Ok(report)
}

/// Contents of a replay file.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReplayFile {
    pub suite: String,
    pub seed: u64,
    pub checks: Vec<Check>,
}
