use clap::{Args, ValueEnum};
use gbmech::verify::{
    exhaustive_battery, find_locality_witness, random_battery, AntiMonotone, Checks, RandomScope, Shape,
    VerificationReport, DEFAULT_GRID,
};
use gbmech::{Error, HyperstarInstance, Mechanism, SchedulingInstance};

use crate::common::{CliError, MechanismArgs};

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub(crate) enum Scope {
    Exhaustive,
    Random,
    All,
}

#[derive(Args)]
pub(crate) struct VerifyArgs {
    /// Also accepts the fixture `anti-monotone`.
    #[command(flatten)]
    mechanism: MechanismArgs,
    #[arg(long, value_enum, default_value_t = Scope::All)]
    scope: Scope,
    /// Random trials.
    #[arg(long, default_value_t = 10_000)]
    trials: u64,
    /// Largest number of tasks in random trials.
    #[arg(long, default_value_t = 6)]
    max_m: usize,
    /// Roots of random hyperstars; 1 draws stars.
    #[arg(long, default_value_t = 1)]
    roots: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Skip the locality probe.
    #[arg(long)]
    no_locality: bool,
    /// One JSON report per line.
    #[arg(long)]
    json: bool,
}

fn handles_hyperstars(mech: &dyn Mechanism) -> Result<bool, Error> {
    let probe: SchedulingInstance = HyperstarInstance::from_f64(&[vec![1.0], vec![1.0]], &[1.0])?.into();
    match mech.allocate(&probe) {
        Ok(_) => Ok(true),
        Err(Error::Inapplicable { .. }) => Ok(false),
        Err(e) => Err(e),
    }
}

fn emit(report: &VerificationReport, json: bool) {
    if json {
        println!("{}", serde_json::to_string(report).expect("reports serialize"));
        return;
    }
    println!("{}", report.line());
    if let Some(ce) = &report.counterexample {
        if !report.passed {
            println!("    {}", serde_json::to_string(ce).expect("transcripts serialize"));
        }
    }
}

pub(crate) fn cmd_verify(args: &VerifyArgs) -> Result<(), CliError> {
    let mech: Box<dyn Mechanism> = if args.mechanism.mechanism == "anti-monotone" {
        Box::new(AntiMonotone)
    } else {
        args.mechanism.build()?
    };
    let mech = mech.as_ref();
    let hyper = handles_hyperstars(mech)?;
    let mut reports = Vec::new();
    if args.scope != Scope::Random {
        reports.extend(exhaustive_battery(mech, Shape::Star { m: 2 }, &DEFAULT_GRID, Checks::default())?);
        if hyper {
            reports.extend(exhaustive_battery(
                mech,
                Shape::Hyperstar { k: 2, m: 2 },
                &DEFAULT_GRID,
                Checks::default(),
            )?);
        }
    }
    if args.scope != Scope::Exhaustive {
        let scope = RandomScope {
            max_m: args.max_m,
            roots: if hyper { args.roots } else { 1 },
            hi: 4.0,
        };
        reports.extend(random_battery(mech, scope, args.trials, args.seed, Checks::default())?);
    }
    let failed = reports.iter().filter(|r| !r.passed).count();
    for r in &reports {
        emit(r, args.json);
    }
    if !args.no_locality {
        let witness = find_locality_witness(mech, Shape::Star { m: 2 }, &DEFAULT_GRID)?;
        let mut probe = VerificationReport::new("locality", mech.name());
        probe.note = Some(if witness.is_some() {
            "non-local".into()
        } else {
            "local on the m=2 grid".into()
        });
        if args.json {
            println!("{}", serde_json::json!({"property": "locality", "mechanism": mech.name(), "note": probe.note, "witness": witness}));
        } else {
            println!("INFO locality [{}]: {}", mech.name(), probe.note.as_deref().unwrap_or(""));
            if let Some(w) = witness {
                println!("    {}", serde_json::to_string(&w).expect("transcripts serialize"));
            }
        }
    }
    if failed > 0 {
        return Err(CliError::Verification(failed));
    }
    Ok(())
}
