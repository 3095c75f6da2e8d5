use std::path::Path;

use num_rational::BigRational;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Map, Value};

use spreadlab_core::discrepancy::ViolatingSet;
use spreadlab_core::exact::{integer, parse_rational, rational, to_f64, Exact};
use spreadlab_core::io::{
    coupling_doc, field_doc, instance_doc, scalar_doc, CouplingDoc, FieldDoc, Instance,
    InstanceDoc, ScalarDoc,
};
use spreadlab_core::laczkovich::{
    claim_check, cube_edge, laczkovich_pipeline, random_family, random_test_set, rho_upper_bound,
};
use spreadlab_core::measure::{cells_per_axis, default_battery, generate_instance, InstanceSpec};
use spreadlab_core::{
    assemble_transport_field, bottleneck_distance, connection_residuals, corollary1_bound,
    corollary2_bound, discrepancy_distance, discrepancy_vs_lebesgue, duality_check,
    feasible_coupling, poisson_connect, ra, ra_tilde, Certificate, Distance, Domain,
    DomainKind, Grid, GridMeasure, Relation,
};

use crate::report::{emit, print_text, read_json, usage, write_json, CliResult, Table};
use crate::suite::{self, Check, ReplayFile, TestSetDoc};
use crate::{
    Cli, Command, DomainArg, FieldCommand, GenArgs, GenKind, Global, LaczkovichCommand,
    PotentialCommand, Status, SuiteArgs, SuiteName,
};

pub fn run(cli: &Cli) -> CliResult<Status> {
    let g = &cli.global;
    match &cli.command {
        Command::Gen(args) => gen(args, g),
        Command::Tra {
            a,
            b,
            relation,
            relation_file,
            witness,
        } => tra(g, a, b, relation.as_deref(), relation_file.as_deref(), witness.as_deref()),
        Command::Di { a, b, certificate } => di(g, a, b, certificate.as_deref()),
        Command::DualCheck { a, b } => dual_check(g, a, b),
        Command::Dvl { instance } => dvl(g, instance),
        Command::Field(f) => field(g, f),
        Command::Laczkovich(l) => laczkovich(g, l),
        Command::Potential(p) => potential(g, p),
        Command::Suite(args) => run_suite(g, args),
        Command::Replay { file } => replay(g, file),
    }
}

fn load(path: &Path) -> CliResult<Instance> {
    Ok(read_json::<InstanceDoc>(path)?.into_instance()?)
}

fn rational_arg(name: &str, text: &str) -> CliResult<BigRational> {
    parse_rational(text).map_err(|e| usage(format!("--{name}: {e}")))
}

fn pitch(g: &Global, default: BigRational) -> CliResult<BigRational> {
    match &g.pitch {
        Some(p) => rational_arg("pitch", p),
        None => Ok(default),
    }
}

fn distance_json(d: &Distance) -> Value {
    json!({
        "exact": d.to_string(),
        "squared": Exact(d.squared().clone()),
        "value": d.value(),
    })
}

fn violating_json(v: &ViolatingSet) -> Value {
    json!({
        "side": v.side,
        "atoms": v.atoms,
        "radius": v.radius.as_ref().map(distance_json),
        "mass": Exact(v.mass.clone()),
        "neighbourhood_mass": Exact(v.neighbourhood_mass.clone()),
    })
}

/// Prints the record and writes its scalar fields as a one-row CSV.
fn record(g: &Global, value: Value) -> CliResult<()> {
    emit(&value, g.json_out.as_deref())?;
    if let Some(path) = &g.csv_out {
        let empty = Map::new();
        let fields = value.as_object().unwrap_or(&empty);
        let scalars: Vec<(&String, &Value)> = fields
            .iter()
            .filter(|(_, v)| !v.is_object() && !v.is_array())
            .collect();
        let mut t = Table::new(&[]);
        t.header = scalars.iter().map(|(k, _)| k.to_string()).collect();
        t.rows.push(
            scalars
                .iter()
                .map(|(_, v)| match v {
                    Value::String(s) => s.clone(),
                    other => other.to_string(),
                })
                .collect(),
        );
        t.write_csv(path)?;
    }
    Ok(())
}

fn gen(args: &GenArgs, g: &Global) -> CliResult<Status> {
    let side = rational_arg("side", &args.side)?;
    let kind = match args.domain {
        DomainArg::Torus => DomainKind::Torus,
        DomainArg::Box => DomainKind::Box,
    };
    let spec = match args.kind {
        GenKind::PerturbedLattice => {
            if kind != DomainKind::Torus {
                return Err(usage("perturbed_lattice lives on the torus"));
            }
            InstanceSpec::PerturbedLattice {
                dim: args.dim,
                side,
                delta: rational_arg("delta", &args.delta)?,
            }
        }
        GenKind::Poisson => InstanceSpec::PoissonProcess {
            dim: args.dim,
            kind,
            side,
            intensity: args.intensity,
            normalize: args.normalize,
        },
        GenKind::Cluster => InstanceSpec::Cluster {
            dim: args.dim,
            kind,
            side,
            parent_intensity: args.intensity,
            mean_offspring: args.mean_offspring,
            radius: to_f64(&rational_arg("radius", &args.radius)?),
            normalize: args.normalize,
        },
        GenKind::BallUniform => {
            let center = if args.center.is_empty() {
                vec![&side / integer(2); args.dim]
            } else {
                args.center
                    .iter()
                    .map(|c| rational_arg("center", c))
                    .collect::<CliResult<_>>()?
            };
            InstanceSpec::BallUniform {
                dim: args.dim,
                kind,
                side,
                center,
                radius: rational_arg("radius", &args.radius)?,
                pitch: pitch(g, rational(1, 16))?,
            }
        }
    };
    let nu = generate_instance(&spec, g.seed)?;
    let doc = instance_doc(&nu, None);
    match &args.output {
        Some(path) => {
            write_json(path, &doc)?;
            record(
                g,
                json!({
                    "output": path.display().to_string(),
                    "atoms": nu.len(),
                    "total_mass": Exact(nu.total_mass()),
                }),
            )?;
        }
        None => print_text(&serde_json::to_string_pretty(&doc)?)?,
    }
    Ok(Status::Pass)
}

#[derive(serde::Deserialize)]
struct RelationDoc {
    allowed: Vec<Vec<bool>>,
}

fn tra(
    g: &Global,
    a: &Path,
    b: &Path,
    relation: Option<&str>,
    relation_file: Option<&Path>,
    witness: Option<&Path>,
) -> CliResult<Status> {
    let (a, b) = (load(a)?.measure, load(b)?.measure);
    let relation = match (relation, relation_file) {
        (Some(r), _) => Some(Relation::radius(&rational_arg("relation", r)?)?),
        (None, Some(path)) => Some(Relation::explicit(read_json::<RelationDoc>(path)?.allowed, &a, &b)?),
        (None, None) => None,
    };
    let Some(relation) = relation else {
        let best = bottleneck_distance(&a, &b)?;
        if let Some(path) = witness {
            let value = best.value.exact().map(Exact);
            write_json(path, &coupling_doc(&best.witness, value, Some(best.candidates_probed)))?;
        }
        record(
            g,
            json!({
                "tra": best.value.to_string(),
                "tra_f64": best.value.value(),
                "candidates_probed": best.candidates_probed,
                "entries": best.witness.entries.len(),
            }),
        )?;
        return Ok(Status::Pass);
    };
    match feasible_coupling(&a, &b, &relation)? {
        Certificate::Coupling(c) => {
            if let Some(path) = witness {
                write_json(path, &coupling_doc(&c, None, None))?;
            }
            record(g, json!({ "feasible": true, "entries": c.entries.len() }))?;
        }
        Certificate::Violating(v) => {
            record(g, json!({ "feasible": false, "violating_set": violating_json(&v) }))?;
        }
    }
    Ok(Status::Pass)
}

fn di(g: &Global, a: &Path, b: &Path, certificate: Option<&Path>) -> CliResult<Status> {
    let (a, b) = (load(a)?.measure, load(b)?.measure);
    let d = discrepancy_distance(&a, &b)?;
    if let Some(path) = certificate {
        let cert = d.certificate_below.as_ref().map(violating_json).unwrap_or(Value::Null);
        write_json(path, &cert)?;
    }
    record(
        g,
        json!({
            "di": d.value.to_string(),
            "di_f64": d.value.value(),
            "method": d.method,
            "candidates_probed": d.candidates_probed,
            "certificate_below": d.certificate_below.as_ref().map(violating_json),
        }),
    )?;
    Ok(Status::Pass)
}

fn dual_check(g: &Global, a: &Path, b: &Path) -> CliResult<Status> {
    let (a, b) = (load(a)?.measure, load(b)?.measure);
    let r = duality_check(&a, &b)?;
    record(
        g,
        json!({
            "tra": r.tra.to_string(),
            "di": r.di.to_string(),
            "gap": r.gap,
            "agree": r.agree,
            "method": r.method,
        }),
    )?;
    Ok(if r.agree { Status::Pass } else { Status::Fail })
}

fn dvl(g: &Global, path: &Path) -> CliResult<Status> {
    let nu = load(path)?.measure;
    let h = pitch(g, rational(1, 8))?;
    let r = discrepancy_vs_lebesgue(&nu, &h)?;
    record(
        g,
        json!({
            "value": r.value.to_string(),
            "value_f64": r.value.value(),
            "lower": r.lower,
            "upper": r.upper,
            "slack": r.slack,
            "cells": r.cells,
            "rescaled": r.rescaled,
            "method": r.method,
        }),
    )?;
    Ok(Status::Pass)
}

fn instance_grid(g: &Global, instance: &Instance) -> CliResult<GridMeasure> {
    if let Some(grid) = &instance.grid {
        return Ok(grid.clone());
    }
    let domain = instance.measure.domain();
    let n = cells_per_axis(domain, &pitch(g, rational(1, 8))?)?;
    Ok(GridMeasure::deposit(&instance.measure, &Grid::cubic(domain.clone(), n)?)?)
}

fn field(g: &Global, command: &FieldCommand) -> CliResult<Status> {
    match command {
        FieldCommand::Poisson {
            instance,
            output,
            potential,
        } => {
            let inst = load(instance)?;
            let nu = instance_grid(g, &inst)?;
            let c = poisson_connect(&nu)?;
            let battery = default_battery(nu.grid().dim(), nu.grid().side());
            let residuals = connection_residuals(&c.field, &nu, &battery)?;
            if let Some(path) = output {
                write_json(path, &field_doc(&c.field))?;
            }
            if let Some(path) = potential {
                write_json(path, &scalar_doc(&c.potential))?;
            }
            let pass = residuals.max_residual <= g.tol;
            record(
                g,
                json!({
                    "shape": nu.grid().shape(),
                    "max_weak_residual": residuals.max_residual,
                    "sup_field": c.field.sup_norm(),
                    "sup_potential": c.potential.sup_norm(),
                    "pass": pass,
                }),
            )?;
            Ok(if pass { Status::Pass } else { Status::Fail })
        }
        FieldCommand::Ra { field } => {
            let v = read_json::<FieldDoc>(field)?.into_field()?;
            let (a, t) = (ra(&v)?, ra_tilde(&v)?);
            record(
                g,
                json!({
                    "ra": a.value,
                    "ra_argmin_r": a.argmin_r,
                    "ra_tilde": t.value,
                    "ra_tilde_argmin_r": t.argmin_r,
                    "ra_profile": a.profile,
                    "ra_tilde_profile": t.profile,
                }),
            )?;
            Ok(Status::Pass)
        }
        FieldCommand::Assemble { coupling, r, output } => {
            let gamma = read_json::<CouplingDoc>(coupling)?.into_coupling()?;
            let domain = gamma.domain().clone();
            let n = match &g.pitch {
                Some(p) => cells_per_axis(&domain, &rational_arg("pitch", p)?)?,
                None => ((8.0 * domain.side_f64() / r).ceil() as usize).next_power_of_two(),
            };
            let v = assemble_transport_field(&gamma, *r, &Grid::cubic(domain, n)?)?;
            if let Some(path) = output {
                write_json(path, &field_doc(&v))?;
            }
            record(
                g,
                json!({
                    "shape": v.grid().shape(),
                    "sup": v.sup_norm(),
                    "l1": v.l1_norm(),
                }),
            )?;
            Ok(Status::Pass)
        }
    }
}

fn laczkovich(g: &Global, command: &LaczkovichCommand) -> CliResult<Status> {
    match command {
        LaczkovichCommand::Claim { dim, m, count } => {
            if !(1..=3).contains(dim) || *m == 0 {
                return Err(usage("need --dim in 1..=3 and --M ≥ 1"));
            }
            let mut rng = ChaCha8Rng::seed_from_u64(g.seed);
            let mut table = Table::new(&["instance", "lhs_a", "lhs_b", "rhs", "pass"]);
            let mut failures = Vec::new();
            for k in 0..*count {
                let v = random_test_set(*dim, *m, &mut rng);
                let r = claim_check(&v, *m)?;
                table.rows.push(vec![
                    k.to_string(),
                    r.lhs_a.to_string(),
                    r.lhs_b.to_string(),
                    Exact(r.rhs.clone()).to_string(),
                    r.pass.to_string(),
                ]);
                if !r.pass {
                    failures.push(Check::Claim {
                        m: *m,
                        v: TestSetDoc::from_set(&v),
                    });
                }
            }
            if let Some(path) = &g.csv_out {
                table.write_csv(path)?;
            }
            emit(
                &json!({
                    "dim": dim,
                    "M": m,
                    "count": count,
                    "failures": failures.len(),
                    "failing": failures,
                }),
                g.json_out.as_deref(),
            )?;
            Ok(if failures.is_empty() { Status::Pass } else { Status::Fail })
        }
        LaczkovichCommand::Bound { instance, rho, count } => {
            let nu = load(instance)?.measure;
            let rho = rational_arg("rho", rho)?;
            let m = cube_edge(&rho, nu.dim())?;
            let mut rng = ChaCha8Rng::seed_from_u64(g.seed);
            let sets: Vec<_> = (0..*count).map(|_| random_test_set(nu.dim(), m, &mut rng)).collect();
            let p = laczkovich_pipeline(&nu, &rho, &sets)?;
            let extent = unit_extent(nu.domain());
            let sampled = rho_upper_bound(&nu, &random_family(nu.dim(), extent, 100, g.seed)?)?;
            let holds = p.all_hold();
            record(
                g,
                json!({
                    "rho": Exact(rho),
                    "M": p.m,
                    "constant": p.constant,
                    "bound": p.bound,
                    "rho_sampled": sampled.rho_hat,
                    "replays": p.replays.len(),
                    "chains_hold": holds,
                }),
            )?;
            Ok(if holds { Status::Pass } else { Status::Fail })
        }
    }
}

fn unit_extent(domain: &Domain) -> i64 {
    (domain.side_f64().floor() as i64 - 4).max(1)
}

fn potential(g: &Global, command: &PotentialCommand) -> CliResult<Status> {
    match command {
        PotentialCommand::Bound1 { potential } => {
            let u = read_json::<ScalarDoc>(potential)?.into_field()?;
            let b = corollary1_bound(&u);
            record(
                g,
                json!({ "bound": b.bound, "r_star": b.r_star, "constant": b.constant, "sup_u": u.sup_norm() }),
            )?;
            Ok(Status::Pass)
        }
        PotentialCommand::Bound2 { potential } => {
            let u = read_json::<ScalarDoc>(potential)?.into_field()?;
            let b = corollary2_bound(&u)?;
            let samples: Vec<Value> = b
                .samples
                .iter()
                .map(|s| json!({ "r": s.r, "single": s.single, "triple": s.triple, "objective": s.objective }))
                .collect();
            record(
                g,
                json!({
                    "bound": b.bound,
                    "r_star": b.r_star,
                    "constant": b.constant,
                    "chain_holds": b.chain_holds,
                    "samples": samples,
                }),
            )?;
            Ok(if b.chain_holds { Status::Pass } else { Status::Fail })
        }
    }
}

fn suite_label(name: SuiteName) -> &'static str {
    match name {
        SuiteName::Duality => "duality",
        SuiteName::Theorem2 => "theorem2",
        SuiteName::Laczkovich => "laczkovich",
        SuiteName::Potentials => "potentials",
        SuiteName::All => "all",
    }
}

fn run_suite(g: &Global, args: &SuiteArgs) -> CliResult<Status> {
    let sizes = suite::parse_sizes(&args.sizes)?;
    let h = pitch(g, rational(1, 8))?;
    let checks = suite::build(args.name, g.seed, sizes, args.count, &h)?;
    let report = suite::run(&checks)?;
    if let Some(path) = &g.csv_out {
        match report.tables.as_slice() {
            [(_, table)] => table.write_csv(path)?,
            tables => {
                for (name, table) in tables {
                    table.write_csv(&path.join(format!("{name}.csv")))?;
                }
            }
        }
    }
    if let Some(path) = &args.plot_out {
        report.plot.table().write_csv(path)?;
    }
    let label = suite_label(args.name);
    if !report.passed() {
        write_json(
            &args.replay_out,
            &ReplayFile {
                suite: label.to_string(),
                seed: g.seed,
                checks: report.failures.clone(),
            },
        )?;
    }
    emit(
        &json!({
            "suite": label,
            "seed": g.seed,
            "checks": report.total,
            "failures": report.failures.len(),
            "tables": report.tables.iter().map(|(n, t)| json!({ "name": n, "rows": t.rows.len() })).collect::<Vec<_>>(),
            "replay": (!report.passed()).then(|| args.replay_out.display().to_string()),
        }),
        g.json_out.as_deref(),
    )?;
    Ok(if report.passed() { Status::Pass } else { Status::Fail })
}

fn replay(g: &Global, file: &Path) -> CliResult<Status> {
    let doc: ReplayFile = read_json(file)?;
    let report = suite::run(&doc.checks)?;
    emit(
        &json!({
            "suite": doc.suite,
            "checks": report.total,
            "failures": report.failures.len(),
        }),
        g.json_out.as_deref(),
    )?;
    Ok(if report.passed() { Status::Pass } else { Status::Fail })
}
