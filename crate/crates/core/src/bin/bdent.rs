use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use bell_entanglement::cli::{
    self, cmd_lqcc, cmd_measure, cmd_nearest, cmd_verify, geometry_csv, geometry_rows, parse_axis,
    parse_plane, parse_state, parse_unitary, GeometryMode, LqccArgs, EXIT_INPUT,
};
use bell_entanglement::{BDState, OracleConfig, Result};

#[derive(Parser)]
#[command(
    name = "bdent",
    version,
    about = "Entanglement of two-qubit Bell-diagonal states"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct StateArgs {
    /// Bell-basis weights p1,p2,p3,p4.
    #[arg(long, allow_hyphen_values = true)]
    p: Option<String>,
    /// Correlation vector t1,t2,t3.
    #[arg(long, allow_hyphen_values = true)]
    t: Option<String>,
}

impl StateArgs {
    fn state(&self) -> Result<BDState> {
        parse_state(self.p.as_deref(), self.t.as_deref())
    }
}

#[derive(Subcommand)]
enum Command {
    /// Every measure for one state.
    Measure {
        #[command(flatten)]
        state: StateArgs,
        #[arg(long)]
        json: bool,
        /// Report entanglement of formation in bits.
        #[arg(long)]
        log2: bool,
    },
    /// Closest separable state and its distance.
    Nearest {
        #[command(flatten)]
        state: StateArgs,
        #[arg(long)]
        json: bool,
    },
    /// Apply local filters (and optional local rotations) and compare with the laws.
    Lqcc {
        #[command(flatten)]
        state: StateArgs,
        #[arg(long, default_value_t = 1.0)]
        mu: f64,
        #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
        a: f64,
        /// x, y, z or ux,uy,uz.
        #[arg(long, default_value = "z", allow_hyphen_values = true)]
        m: String,
        #[arg(long, default_value_t = 1.0)]
        nu: f64,
        #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
        b: f64,
        #[arg(long, default_value = "z", allow_hyphen_values = true)]
        n: String,
        /// Rotation on A as AXIS:ANGLE.
        #[arg(long, allow_hyphen_values = true)]
        ua: Option<String>,
        /// Rotation on B as AXIS:ANGLE.
        #[arg(long, allow_hyphen_values = true)]
        ub: Option<String>,
        #[arg(long)]
        json: bool,
    },
    /// CSV of region labels and concurrence over the state tetrahedron.
    Geometry {
        #[arg(long, default_value_t = 21)]
        grid: usize,
        /// Fix one coordinate, e.g. t3=0.
        #[arg(long, allow_hyphen_values = true)]
        plane: Option<String>,
        /// Sample the Werner line t = (-x,-x,-x) instead.
        #[arg(long, conflicts_with = "plane")]
        werner: bool,
    },
    /// Run every invariant check and print the JSON report.
    Verify {
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 1000)]
        samples: usize,
        #[arg(long, default_value_t = 0.01)]
        grid_step: f64,
        /// Override every per-check tolerance.
        #[arg(long)]
        tolerance: Option<f64>,
    },
}

fn run(command: Command) -> Result<(String, i32)> {
    let ok = |s: String| (s, cli::EXIT_OK);
    match command {
        Command::Measure { state, json, log2 } => Ok(ok(cmd_measure(&state.state()?, json, log2)?)),
        Command::Nearest { state, json } => Ok(ok(cmd_nearest(&state.state()?, json)?)),
        Command::Lqcc {
            state,
            mu,
            a,
            m,
            nu,
            b,
            n,
            ua,
            ub,
            json,
        } => {
            let s = state.state()?;
            let args = LqccArgs {
                mu,
                a,
                m: parse_axis(&m)?,
                nu,
                b,
                n: parse_axis(&n)?,
                unitary_a: ua.as_deref().map(parse_unitary).transpose()?,
                unitary_b: ub.as_deref().map(parse_unitary).transpose()?,
            };
            Ok(ok(cmd_lqcc(&s, &args, json)?))
        }
        Command::Geometry {
            grid,
            plane,
            werner,
        } => {
            let mode = if werner {
                GeometryMode::Werner
            } else {
                GeometryMode::Grid {
                    plane: plane.as_deref().map(parse_plane).transpose()?,
                }
            };
            let rows = geometry_rows(grid, mode)?;
            if rows.is_empty() {
                eprintln!("warning: the requested plane does not meet the state tetrahedron");
            }
            Ok(ok(geometry_csv(&rows)))
        }
        Command::Verify {
            seed,
            samples,
            grid_step,
            tolerance,
        } => cmd_verify(&OracleConfig {
            seed,
            grid_step,
            sample_count: samples,
            tolerance,
        }),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INPUT } else { 0 };
            let _ = e.print();
            return ExitCode::from(code as u8);
        }
    };
    match run(cli.command) {
        Ok((out, code)) => {
            print!("{out}");
            ExitCode::from(code as u8)
        }
        Err(e) => {
            eprintln!("bdent: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
