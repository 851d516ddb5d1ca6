use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Context;
use clap::{Parser, Subcommand};
use stlplan::{exit, load_scenario, output, run, write_artifacts};
use stlplan_core::stl::oracle_satisfies_formula;
use stlplan_core::{decompose, plan_global};

#[derive(Parser)]
#[command(name = "stlplan", version, about = "Plan and optimize unicycle trajectories for STL tasks")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check a scenario file without running anything.
    Validate { file: PathBuf },
    /// Print the cuts and local tasks.
    Decompose {
        file: PathBuf,
        /// Also list every sub-task with its split.
        #[arg(long)]
        explain: bool,
    },
    /// Run the waypoint planner only and print the plan as CSV.
    Plan {
        file: PathBuf,
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Run the full pipeline and write all artifacts.
    Run {
        file: PathBuf,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        out: PathBuf,
        /// Run this many consecutive seeds in parallel, each into its own
        /// `seed-<n>` directory.
        #[arg(long)]
        repeat: Option<u64>,
    },
    /// Re-verify a trajectory CSV against the scenario's task.
    Check { trajectory: PathBuf, file: PathBuf },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli.command) {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit::CONFIG_ERROR as u8)
        }
    }
}

fn dispatch(cmd: Command) -> anyhow::Result<i32> {
    match cmd {
        Command::Validate { file } => {
            let sc = load_scenario(&file, None)?;
            println!(
                "ok: {} sub-tasks, horizon {} s, {} obstacles, {} regions",
                sc.formula.subtasks.len(),
                sc.formula.horizon() as f64 * sc.formula.tau,
                sc.workspace.obstacles.len(),
                sc.workspace.regions.len()
            );
            Ok(exit::SATISFIED)
        }
        Command::Decompose { file, explain } => {
            let sc = load_scenario(&file, None)?;
            let d = decompose(&sc.formula);
            if explain {
                for (i, s) in sc.formula.subtasks.iter().enumerate() {
                    let split = stlplan_core::decompose::split_subtask(s, &d.cuts);
                    println!("sub-task {i}: {}  ->  {split:?}", s.display(sc.formula.tau));
                }
                println!();
            }
            print!("{}", d.report());
            Ok(exit::SATISFIED)
        }
        Command::Plan { file, seed } => {
            let sc = load_scenario(&file, seed)?;
            let d = decompose(&sc.formula);
            match plan_global(&d, sc.start(), &sc.workspace, &sc.planner) {
                Ok(plan) => {
                    print!("{}", output::plan_csv(&plan.waypoints));
                    Ok(exit::SATISFIED)
                }
                Err(e) => {
                    eprintln!("plan stage failed: {e}");
                    Ok(exit::STAGE_FAILURE)
                }
            }
        }
        Command::Run { file, seed, out, repeat } => {
            let base = load_scenario(&file, seed)?;
            let n = repeat.unwrap_or(1);
            if n <= 1 {
                let report = run(&base);
                write_artifacts(&out, &base, &report).with_context(|| format!("writing {}", out.display()))?;
                print_summary(base.planner.seed, &report);
                return Ok(report.exit_code());
            }
            let codes: Vec<anyhow::Result<i32>> = std::thread::scope(|s| {
                let handles: Vec<_> = (0..n)
                    .map(|i| {
                        let mut sc = base.clone();
                        sc.planner.seed = base.planner.seed.wrapping_add(i);
                        let dir = out.join(format!("seed-{}", sc.planner.seed));
                        s.spawn(move || -> anyhow::Result<i32> {
                            let report = run(&sc);
                            write_artifacts(&dir, &sc, &report).with_context(|| format!("writing {}", dir.display()))?;
                            print_summary(sc.planner.seed, &report);
                            Ok(report.exit_code())
                        })
                    })
                    .collect();
                handles.into_iter().map(|h| h.join().expect("worker panicked")).collect()
            });
            let mut worst = exit::SATISFIED;
            for c in codes {
                worst = worst.max(c?);
            }
            Ok(worst)
        }
        Command::Check { trajectory, file } => {
            let sc = load_scenario(&file, None)?;
            let seq = output::read_traj_csv(&trajectory, sc.formula.tau)?;
            let ws = &sc.workspace;
            let sat = oracle_satisfies_formula(&seq, &sc.formula, ws).unwrap_or(false);
            let free = seq.points.windows(2).all(|w| !ws.segment_collides(w[0], w[1]));
            println!("satisfied: {sat}");
            println!("collision free: {free}");
            Ok(if sat && free { exit::SATISFIED } else { exit::UNSATISFIED })
        }
    }
}

fn print_summary(seed: u64, report: &stlplan::RunReport) {
    match &report.outcome {
        Ok(o) => println!(
            "seed {seed}: satisfied={} length={:.3} m violation={:.2e} time={:.2} s",
            report.satisfied(),
            o.length,
            o.solution.max_violation,
            report.wall_clock
        ),
        Err(f) => println!("seed {seed}: {f} (time {:.2} s)", report.wall_clock),
    }
}
