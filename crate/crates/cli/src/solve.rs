use std::path::PathBuf;

use clap::Args;
use gbmech::decomposition::{
    contention_number, degeneracy_ordering, orientation_number, star_cover_from_ordering,
    star_cover_from_orientation,
};
use gbmech::instances::InstanceFile;
use gbmech::oracle::{optimal_allocation, ratio, star_makespan_optimum};
use gbmech::{objective_value, Cost, Error, GraphInstance, Objective, SchedulingInstance, Sense};
use serde_json::json;

use crate::common::{describe, num, objective_label, CliError, MechanismArgs, ObjectiveKind, Source};

#[derive(Args)]
pub(crate) struct SolveArgs {
    /// Instance file (JSON).
    file: PathBuf,
    #[command(flatten)]
    mechanism: MechanismArgs,
    /// Overrides the objective stored in the file.
    #[arg(long, value_enum)]
    objective: Option<ObjectiveKind>,
    #[arg(long)]
    objective_p: Option<f64>,
    /// Print one JSON object instead of text.
    #[arg(long)]
    json: bool,
}

pub(crate) fn load(path: &PathBuf) -> Result<InstanceFile, CliError> {
    InstanceFile::read(path).map_err(|e| CliError::at(path, e))
}

/// Exact optimum, or `None` when the instance is beyond every oracle.
pub(crate) fn optimum(inst: &SchedulingInstance, obj: Objective) -> Result<Option<Cost>, Error> {
    match optimal_allocation(inst, obj) {
        Ok((_, v)) => Ok(Some(v)),
        Err(Error::Capacity { .. }) => match (inst.as_star(), obj) {
            (Some(s), Objective::Makespan) => Ok(Some(star_makespan_optimum(s).1)),
            _ => Ok(None),
        },
        Err(e) => Err(e),
    }
}

pub(crate) fn cmd_solve(args: &SolveArgs) -> Result<(), CliError> {
    let file = load(&args.file)?;
    let mech = args.mechanism.build()?;
    let obj = match args.objective {
        Some(kind) => kind.build(args.objective_p.or(args.mechanism.p))?,
        None => match (file.objective, mech.sense()) {
            (Some(o), _) => o,
            (None, Sense::Minimize) => Objective::Makespan,
            (None, Sense::Maximize) => Objective::lp_max(args.mechanism.p.unwrap_or(2.0))?,
        },
    };
    if obj.sense() != mech.sense() {
        return Err(Error::InvalidParameter(format!(
            "{} {}s but the objective is {}",
            mech.name(),
            if mech.sense() == Sense::Minimize { "minimize" } else { "maximize" },
            objective_label(obj)
        ))
        .into());
    }
    let inst = &file.instance;
    let (alloc, pay) = mech.run(inst)?;
    let value = objective_value(inst, &alloc, obj)?;
    let opt = optimum(inst, obj)?;
    let r = match opt {
        Some(o) => match ratio(value, o, obj.sense()) {
            Ok(r) => Some(r),
            Err(Error::Degenerate(_)) => None,
            Err(e) => return Err(e.into()),
        },
        None => None,
    };
    if args.json {
        let out = json!({
            "mechanism": mech.name(),
            "objective": obj,
            "allocation": alloc,
            "value": value.get(),
            "payments": pay.amounts,
            "opt": opt.map(|c| c.get()),
            "ratio": r.map(|r| r.value),
        });
        println!("{out}");
        return Ok(());
    }
    println!("mechanism: {}", mech.name());
    println!(
        "instance: {} with {} tasks and {} machines",
        inst.kind(),
        inst.num_tasks(),
        inst.num_machines()
    );
    println!("objective: {}", objective_label(obj));
    println!("assignment: {:?}", alloc.assignment);
    println!("value: {}", num(value.get()));
    let pays: Vec<String> = pay.amounts.iter().map(|&x| num(x)).collect();
    println!("payments: [{}]", pays.join(", "));
    match opt {
        Some(o) => println!("opt: {}", num(o.get())),
        None => println!("opt: skipped (instance exceeds oracle capacity)"),
    }
    match (opt, r) {
        (Some(_), Some(r)) if r.degenerate => println!("ratio: 1 (both values are zero or infinite)"),
        (Some(_), Some(r)) => println!("ratio: {}", r.value),
        (Some(_), None) => println!("ratio: undefined (zero denominator)"),
        (None, _) => {}
    }
    Ok(())
}

#[derive(Args)]
pub(crate) struct DecomposeArgs {
    /// Graph (or star) instance file.
    file: PathBuf,
    /// Which decomposition to print and bound.
    #[arg(long, value_enum, default_value_t = Source::Orientation)]
    source: Source,
    #[arg(long)]
    json: bool,
}

pub(crate) fn cmd_decompose(args: &DecomposeArgs) -> Result<(), CliError> {
    let file = load(&args.file)?;
    let g: GraphInstance = match &file.instance {
        SchedulingInstance::Graph(g) => g.clone(),
        SchedulingInstance::Star(s) => s.to_graph(),
        other => {
            return Err(Error::Inapplicable {
                mechanism: "decompose".into(),
                instance: other.kind().to_string(),
            }
            .into())
        }
    };
    let (o, orient) = orientation_number(&g);
    let ord = degeneracy_ordering(&g);
    let decomp = match args.source {
        Source::Orientation => star_cover_from_orientation(&g, &orient),
        Source::Degeneracy => star_cover_from_ordering(&g, &ord),
    };
    let c = contention_number(&decomp);
    if args.json {
        let stars: Vec<_> = decomp
            .stars()
            .iter()
            .map(|s| json!({"root": s.root, "edges": s.edges}))
            .collect();
        let out = json!({
            "orientation_number": o,
            "degeneracy": ord.k,
            "degeneracy_order": ord.order,
            "source": format!("{:?}", args.source).to_lowercase(),
            "stars": stars,
            "contention": c,
            "bound_contention": 2 * c,
            "bound_orientation": 2 * o + 2,
            "bound_degeneracy": 2 * ord.k + 2,
        });
        println!("{out}");
        return Ok(());
    }
    println!("nodes: {}, edges: {}", g.n(), g.m());
    println!("orientation number o(G): {o}");
    println!("degeneracy k: {} (order {:?})", ord.k, ord.order);
    println!("decomposition ({:?}): {} stars", args.source, decomp.len());
    for line in describe(&decomp) {
        println!("  {line}");
    }
    println!("contention c(T): {c}");
    println!(
        "ratio bounds: 2c(T) = {}, 2o(G)+2 = {}, 2k+2 = {}",
        2 * c,
        2 * o + 2,
        2 * ord.k + 2
    );
    Ok(())
}
