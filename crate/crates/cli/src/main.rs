use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use serde_json::Value;

use sochub::casestudy::{lieb_ground_state_spin, ring_symmetry_breaking, RingSpec};
use sochub::fock::{build_basis, eigensolve_dense};
use sochub::hamiltonian::{build_many_body, build_single_particle};
use sochub::io::{lieb_json, report_json, ring_json, round15, spectrum_json, to_pretty, ModelFile};
use sochub::symmetry::analyze;
use sochub::{ModelGraph64, Result};

/// Symmetry analysis of spin-orbit coupled Hubbard models.
#[derive(Debug, Parser)]
#[command(name = "sochub", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Commutator analysis of a model in one particle-number sector.
    Analyze {
        model: PathBuf,
        #[arg(long)]
        particles: usize,
        /// Write the JSON report here.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Single-particle spectrum, plus the many-body spectrum of one sector.
    Spectrum {
        model: PathBuf,
        #[arg(long)]
        particles: Option<usize>,
        /// Print JSON instead of plain text.
        #[arg(long)]
        json: bool,
    },
    /// Pseudo-spin conservation on the spin-orbit ring.
    RingDemo {
        #[arg(long = "N")]
        n: usize,
        #[arg(long = "J", default_value_t = 1.0)]
        j: f64,
        #[arg(long = "U", allow_hyphen_values = true)]
        u: f64,
        /// Particle number; defaults to half filling.
        #[arg(long)]
        filling: Option<usize>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Ground-state spin against Lieb's theorem.
    LiebCheck {
        model: PathBuf,
        /// Uniform on-site interaction replacing the model's values.
        #[arg(long = "U", allow_hyphen_values = true)]
        u: Option<f64>,
        /// Particle number; defaults to half filling.
        #[arg(long)]
        filling: Option<usize>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn load(path: &Path) -> Result<(ModelFile, ModelGraph64)> {
    let file = ModelFile::read(path)?;
    let graph = file.to_graph()?;
    Ok((file, graph))
}

fn write_json(path: &Path, v: &Value) -> Result<()> {
    Ok(fs::write(path, to_pretty(v))?)
}

fn cmd_analyze(model: &Path, particles: usize, out: Option<&Path>) -> Result<()> {
    let (file, g) = load(model)?;
    let basis = build_basis(g.n_sites(), particles)?;
    let report = analyze(&g, &basis)?;
    println!("topology: {}", sochub::io::topology_name(report.topology));
    println!("trivializable: {}", report.trivializable);
    println!("kramers_ok: {}", report.kramers_ok);
    for v in &report.verdicts {
        println!("{v}");
    }
    if let Some(path) = out {
        write_json(path, &report_json(&file, &report))?;
    }
    Ok(())
}

fn cmd_spectrum(model: &Path, particles: Option<usize>, json: bool) -> Result<()> {
    let (_, g) = load(model)?;
    let single = build_single_particle(&g).eigen()?.values;
    let sector = match particles {
        Some(n) => {
            let basis = build_basis(g.n_sites(), n)?;
            Some((n, eigensolve_dense(&build_many_body(&g, &basis)?)?.values))
        }
        None => None,
    };
    if json {
        print!(
            "{}",
            to_pretty(&spectrum_json(
                &single,
                sector.as_ref().map(|(n, v)| (*n, v.as_slice()))
            ))
        );
        return Ok(());
    }
    println!("single-particle:");
    for v in &single {
        println!("{}", round15(*v));
    }
    if let Some((n, values)) = &sector {
        println!("N={n}:");
        for v in values {
            println!("{}", round15(*v));
        }
    }
    Ok(())
}

fn cmd_ring_demo(n: usize, j: f64, u: f64, filling: Option<usize>, out: Option<&Path>) -> Result<()> {
    let spec = RingSpec::new(n, j, u)?;
    let filling = filling.unwrap_or(n);
    let r = ring_symmetry_breaking(&spec, filling)?;
    println!("dim={} threshold={:.3e}", r.dim, r.threshold);
    println!("U=0: max ‖[F, H]‖ = {:.6e}", r.norm_free);
    println!("U={u}: max ‖[F, H]‖ = {:.6e}", r.norm_interacting);
    if r.interacting_conserved() {
        println!("conserved");
    } else {
        println!("broken, norm={}", round15(r.norm_interacting));
    }
    if let Some(path) = out {
        write_json(path, &ring_json(n, j, u, filling, &r))?;
    }
    Ok(())
}

fn cmd_lieb_check(model: &Path, u: Option<f64>, filling: Option<usize>, out: Option<&Path>) -> Result<()> {
    let (_, mut g) = load(model)?;
    if let Some(u) = u {
        g = g.with_uniform_u(u);
    }
    let basis = build_basis(g.n_sites(), filling.unwrap_or(g.n_sites()))?;
    let r = lieb_ground_state_spin(&g, &basis)?;
    println!("degeneracy={} E0={}", r.degeneracy, round15(r.ground_energy));
    println!(
        "S={} (expected {}) {}",
        r.spin(),
        r.expected_spin(),
        if r.passes() { "PASS" } else { "FAIL" }
    );
    if let Some(path) = out {
        write_json(path, &lieb_json(&r))?;
    }
    Ok(())
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Analyze { model, particles, out } => cmd_analyze(&model, particles, out.as_deref()),
        Command::Spectrum { model, particles, json } => cmd_spectrum(&model, particles, json),
        Command::RingDemo { n, j, u, filling, out } => cmd_ring_demo(n, j, u, filling, out.as_deref()),
        Command::LiebCheck { model, u, filling, out } => cmd_lieb_check(&model, u, filling, out.as_deref()),
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(if e.is_input_error() { 2 } else { 3 })
        }
    }
}
