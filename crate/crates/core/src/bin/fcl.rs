use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use fcl::envs::{build_game, game_names};
use fcl::game::{check_symmetry, file, GameSpec, PlayerPermutation, StationaryProfile};
use fcl::harness::{parse_config, run_experiment, text_report};
use fcl::oracle::{egalitarian_check, exact_values, fmt_value, folk_inequality_check};

#[derive(Parser)]
#[command(name = "fcl", version, about = "Repeated symmetric stochastic games with foolproof cooperative learners")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run an experiment described by a TOML config and print its summary.
    Run {
        #[arg(long)]
        config: PathBuf,
        /// CSV destination, overriding the config's `output`.
        #[arg(long)]
        output: Option<PathBuf>,
        /// Moving-average window, overriding the config's `window`.
        #[arg(long)]
        window: Option<usize>,
    },
    /// Print exact cooperative, minimax and defection values.
    Oracle {
        /// Bundled game name or path to a game description file.
        #[arg(long)]
        game: String,
        #[arg(long, default_value_t = 1.0)]
        gamma: f64,
    },
    /// Check symmetry, the folk inequality and the egalitarian schedule.
    Verify {
        #[arg(long)]
        game: String,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// List the bundled games.
    ListGames,
    /// Write a bundled game as a game description file.
    ExportGame {
        #[arg(long)]
        game: String,
        /// Destination file; stdout when omitted.
        #[arg(long)]
        output: Option<PathBuf>,
    },
}

fn load_game(name: &str) -> fcl::Result<GameSpec> {
    let path = Path::new(name);
    if path.is_file() {
        file::load(path)
    } else {
        build_game(name)
    }
}

fn verify(game: &GameSpec, seed: u64) -> fcl::Result<bool> {
    let n = game.num_players();
    let horizon = game.max_stage_steps();
    let perms = if n <= 5 {
        PlayerPermutation::all(n)
    } else {
        game.stored_symmetries().iter().map(|g| g.players.clone()).collect()
    };
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let profiles: Vec<StationaryProfile> = (0..3).map(|_| StationaryProfile::random(game, &mut rng)).collect();
    let mut worst = 0.0f64;
    let mut sym_ok = true;
    for psi in &perms {
        for p in &profiles {
            let r = check_symmetry(game, psi, p, horizon)?;
            worst = worst.max(r.max_deviation);
            sym_ok &= r.passed;
        }
    }
    println!(
        "symmetry: {} ({} permutations, max deviation {:.2e})",
        pass(sym_ok),
        perms.len(),
        worst
    );

    let values = exact_values(game, 1.0)?;
    let folk = folk_inequality_check(&values);
    println!("folk inequality: {}", pass(folk.passed));
    for (i, (m, p)) in folk.margins.iter().zip(&values.players).enumerate() {
        match m {
            Some(m) => println!("  player {i}: K={} margin {}", p.k, fmt_value(*m)),
            None => println!(
                "  player {i}: retaliation count UNBOUNDED (V^c={} equals minimax V^r={}; the inequality holds only in the limit of endless punishment)",
                fmt_value(p.v_egalitarian),
                fmt_value(p.v_retaliate)
            ),
        }
    }

    let egal = egalitarian_check(game, 200, seed)?;
    let avgs: Vec<String> = egal.averages.iter().map(|&x| fmt_value(x)).collect();
    println!(
        "egalitarian: {} (averages [{}], spread {:.2e}, best competitor minimum {} over {} profiles)",
        pass(egal.passed),
        avgs.join(", "),
        egal.spread,
        fmt_value(egal.best_competitor_min),
        egal.competitors_checked
    );
    Ok(sym_ok && folk.passed && egal.passed)
}

fn pass(ok: bool) -> &'static str {
    if ok {
        "PASS"
    } else {
        "FAIL"
    }
}

fn dispatch(cli: Cli) -> fcl::Result<bool> {
    match cli.command {
        Command::Run { config, output, window } => {
            let text = std::fs::read_to_string(&config)?;
            let mut cfg = parse_config(&text)?;
            if let Some(o) = output {
                cfg.output = Some(o);
            }
            if let Some(w) = window {
                cfg.window = w;
            }
            let game = cfg.validate()?;
            let result = run_experiment(&cfg)?;
            print!("{}", text_report(&game, cfg.gamma, &result, cfg.window)?);
            if let Some(o) = &cfg.output {
                println!("wrote {}", o.display());
            }
        }
        Command::Oracle { game, gamma } => {
            let g = load_game(&game)?;
            print!("{}", exact_values(&g, gamma)?.report());
        }
        Command::Verify { game, seed } => {
            let g = load_game(&game)?;
            return verify(&g, seed);
        }
        Command::ListGames => {
            for name in game_names() {
                println!("{name}");
            }
        }
        Command::ExportGame { game, output } => {
            let g = load_game(&game)?;
            match output {
                Some(path) => file::save(&g, path)?,
                None => print!("{}", file::to_text(&g)),
            }
        }
    }
    Ok(true)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::FAILURE,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
