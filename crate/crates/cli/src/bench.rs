use std::path::PathBuf;
use std::time::Instant;

use clap::Args;
use gbmech::decomposition::degeneracy_ordering;
use gbmech::instances::generate;
use gbmech::oracle::ratio;
use gbmech::{objective_value, Error, Mechanism, Objective, SchedulingInstance};
use rayon::prelude::*;

use crate::common::{num, params, CliError, ObjectiveKind, Source, Tie};
use crate::solve::optimum;
use crate::FamilyArgs;

const HEADER: [&str; 12] = [
    "instance_id",
    "family",
    "m",
    "n",
    "k",
    "p",
    "mechanism",
    "alg_value",
    "opt_value",
    "ratio",
    "runtime_ms",
    "flag",
];

#[derive(Args)]
pub(crate) struct BenchArgs {
    #[command(flatten)]
    family: FamilyArgs,
    /// Sweep of the size parameter, as `lo..hi` (inclusive) or a comma list. It sets
    /// `m` for star families, `k` for tree-lb and `n` for graph families.
    #[arg(long)]
    sizes: String,
    /// Instances per size (useful for random families).
    #[arg(long, default_value_t = 1)]
    instances: u64,
    /// Comma-separated mechanism names.
    #[arg(long, value_delimiter = ',', required = true)]
    mechanisms: Vec<String>,
    /// Norm parameter of the L^p mechanisms.
    #[arg(long = "mech-p")]
    mech_p: Option<f64>,
    #[arg(long, value_enum, default_value_t = Tie::Root)]
    tie: Tie,
    #[arg(long, value_enum, default_value_t = Source::Orientation)]
    decomposition: Source,
    #[arg(long, value_enum, default_value_t = ObjectiveKind::Makespan)]
    objective: ObjectiveKind,
    #[arg(long)]
    objective_p: Option<f64>,
    /// Fill runtime_ms; rows are no longer byte-reproducible.
    #[arg(long)]
    timing: bool,
    /// CSV path; `-` writes to stdout.
    #[arg(long, short)]
    output: PathBuf,
}

fn parse_sizes(text: &str) -> Result<Vec<usize>, CliError> {
    let bad = || CliError::Core(Error::InvalidParameter(format!("cannot read sizes `{text}`")));
    let sizes: Vec<usize> = if let Some((lo, hi)) = text.split_once("..") {
        let lo: usize = lo.trim().parse().map_err(|_| bad())?;
        let hi: usize = hi.trim().parse().map_err(|_| bad())?;
        (lo..=hi).collect()
    } else {
        text.split(',').map(|s| s.trim().parse().map_err(|_| bad())).collect::<Result<_, _>>()?
    };
    if sizes.is_empty() {
        return Err(bad());
    }
    Ok(sizes)
}

struct Row {
    instance_id: u64,
    mechanism: String,
    fields: [String; 12],
}

fn shape(inst: &SchedulingInstance) -> (usize, usize, usize) {
    match inst {
        SchedulingInstance::Star(s) => (s.m(), s.m() + 1, 1),
        SchedulingInstance::Hyperstar(h) => (h.m(), h.k() + h.m(), h.k()),
        SchedulingInstance::Graph(g) => (g.m(), g.n(), degeneracy_ordering(g).k),
    }
}

fn measure(
    mech: &dyn Mechanism,
    inst: &SchedulingInstance,
    obj: Objective,
    opt: &Result<Option<gbmech::Cost>, Error>,
    timing: bool,
) -> [String; 5] {
    let empty = String::new;
    if mech.sense() != obj.sense() {
        return [empty(), empty(), empty(), empty(), "sense-mismatch".into()];
    }
    let start = Instant::now();
    let alloc = match mech.allocate(inst) {
        Ok(a) => a,
        Err(e) => {
            let flag = match e {
                Error::Capacity { .. } => "capacity",
                Error::Inapplicable { .. } => "inapplicable",
                _ => "error",
            };
            return [empty(), empty(), empty(), empty(), flag.into()];
        }
    };
    let runtime = start.elapsed().as_secs_f64() * 1e3;
    let runtime = if timing { format!("{runtime:.3}") } else { empty() };
    let alg = objective_value(inst, &alloc, obj).expect("mechanism allocations are valid");
    let (opt_cell, ratio_cell, flag) = match opt {
        Ok(Some(o)) => match ratio(alg, *o, obj.sense()) {
            Ok(r) => (num(o.get()), num(r.value), if r.degenerate { "degenerate" } else { "" }),
            Err(_) => (num(o.get()), empty(), "undefined-ratio"),
        },
        Ok(None) => (empty(), empty(), "capacity"),
        Err(_) => (empty(), empty(), "error"),
    };
    [num(alg.get()), opt_cell, ratio_cell, runtime, flag.into()]
}

pub(crate) fn cmd_benchmark(args: &BenchArgs) -> Result<(), CliError> {
    let sizes = parse_sizes(&args.sizes)?;
    let obj = args.objective.build(args.objective_p)?;
    let mp = params(args.mech_p, args.tie, args.decomposition.source());
    let mut names = args.mechanisms.clone();
    names.sort();
    names.dedup();
    let mechs: Vec<Box<dyn Mechanism>> = names
        .iter()
        .map(|n| gbmech::mechanisms::by_name(n, &mp))
        .collect::<Result<_, _>>()?;
    let family = args.family.family.name();
    let mut jobs = Vec::new();
    for &size in &sizes {
        for _ in 0..args.instances {
            let id = jobs.len() as u64;
            let mut gp = args.family.params();
            match family {
                "tree-lb" => gp.k = size,
                f if f.starts_with("random-") && f != "random-star" && f != "random-hyperstar" => gp.n = size,
                _ => gp.m = size,
            }
            gp.seed = args.family.seed.wrapping_mul(0x9E37_79B9_7F4A_7C15).wrapping_add(id);
            jobs.push((id, gp));
        }
    }
    let instances: Vec<(u64, SchedulingInstance)> = jobs
        .into_iter()
        .map(|(id, gp)| Ok((id, generate(&gp)?)))
        .collect::<Result<_, Error>>()?;
    let p_cell = obj.p().map(num).unwrap_or_default();
    let mut rows: Vec<Row> = instances
        .par_iter()
        .flat_map_iter(|(id, inst)| {
            let opt = optimum(inst, obj);
            let (m, n, k) = shape(inst);
            let p_cell = p_cell.clone();
            mechs
                .iter()
                .map(|mech| {
                    let [alg, opt_v, r, t, flag] = measure(mech.as_ref(), inst, obj, &opt, args.timing);
                    Row {
                        instance_id: *id,
                        mechanism: mech.name(),
                        fields: [
                            id.to_string(),
                            family.to_string(),
                            m.to_string(),
                            n.to_string(),
                            k.to_string(),
                            p_cell.clone(),
                            mech.name(),
                            alg,
                            opt_v,
                            r,
                            t,
                            flag,
                        ],
                    }
                })
                .collect::<Vec<_>>()
        })
        .collect();
    rows.sort_by(|a, b| a.instance_id.cmp(&b.instance_id).then_with(|| a.mechanism.cmp(&b.mechanism)));
    let sink: Box<dyn std::io::Write> = if args.output.as_os_str() == "-" {
        Box::new(std::io::stdout())
    } else {
        Box::new(
            std::fs::File::create(&args.output)
                .map_err(|e| CliError::Io(format!("cannot create {}: {e}", args.output.display())))?,
        )
    };
    let mut w = csv::Writer::from_writer(sink);
    let io = |e: csv::Error| CliError::Io(format!("cannot write CSV: {e}"));
    w.write_record(HEADER).map_err(io)?;
    for row in &rows {
        w.write_record(&row.fields).map_err(io)?;
    }
    w.flush().map_err(|e| CliError::Io(format!("cannot write CSV: {e}")))?;
    if args.output.as_os_str() != "-" {
        eprintln!("wrote {} rows to {}", rows.len(), args.output.display());
    }
    Ok(())
}
