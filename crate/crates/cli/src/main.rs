mod commands;
mod descriptor;
mod render;

use clap::{Args, Parser, Subcommand};
use commands::{Failure, Outcome};
use descriptor::{parse_subgroup, GroupSpec, ModuleSpec, RunDescriptor};
use std::path::PathBuf;
use std::process::ExitCode;

/// Exact spectral sequences, resolutions and comparison checks over prime fields.
#[derive(Parser, Debug)]
#[command(name = "specseq", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Default, Clone)]
struct InstanceArgs {
    /// Instance document (JSON or TOML); flags override its fields.
    #[arg(long)]
    instance: Option<PathBuf>,
    /// cyclic:n, klein4, q8 or s3.
    #[arg(long)]
    group: Option<String>,
    /// Characteristic of the ground field.
    #[arg(long)]
    p: Option<u32>,
    /// Element indices, comma separated.
    #[arg(long)]
    subgroup: Option<String>,
    /// trivial or regular; explicit modules go in the instance document.
    #[arg(long)]
    module: Option<String>,
    /// Highest total degree reported.
    #[arg(long)]
    degree: Option<usize>,
    /// Run even when a hypothesis fails.
    #[arg(long)]
    waive: bool,
}

#[derive(Args, Debug, Clone)]
struct Common {
    /// Write the JSON report here.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Print per-entry detail.
    #[arg(short, long, global = true)]
    verbose: bool,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Homology of a complex, and the pages of a filtered complex.
    Homology {
        #[arg(long)]
        complex: PathBuf,
        #[arg(long, default_value_t = 3)]
        pages: i64,
        #[command(flatten)]
        common: Common,
    },
    /// A resolution of a module over a group algebra.
    Resolve {
        #[command(flatten)]
        inst: InstanceArgs,
        /// projective or injective.
        #[arg(long, default_value = "projective")]
        kind: String,
        /// minimal or free.
        #[arg(long, default_value = "minimal")]
        provider: String,
        #[command(flatten)]
        common: Common,
    },
    /// The Grothendieck spectral sequence of a composite G ∘ F.
    Gss {
        #[command(flatten)]
        inst: InstanceArgs,
        /// fixed_points, hom_from, hom_into, tensor or identity.
        #[arg(long, default_value = "fixed_points")]
        f: String,
        /// invariants, hom_from or identity.
        #[arg(long, default_value = "invariants")]
        g: String,
        /// Skip the acyclicity conditions.
        #[arg(long)]
        no_check: bool,
        #[command(flatten)]
        common: Common,
    },
    /// The LHS spectral sequence and its identification with the Grothendieck spectral sequence.
    Lhs {
        #[command(flatten)]
        inst: InstanceArgs,
        /// Last finite page printed.
        #[arg(long)]
        pages: Option<i64>,
        #[command(flatten)]
        common: Common,
    },
    /// Comparison of the two-variable functor with the composite.
    CompareFirst {
        #[command(flatten)]
        inst: InstanceArgs,
        /// hopf or hom-identity.
        #[arg(long, default_value = "hopf")]
        setting: String,
        #[command(flatten)]
        common: Common,
    },
    /// Comparison of the double complex G(B, F A) with the Grothendieck side.
    CompareSecond {
        #[command(flatten)]
        inst: InstanceArgs,
        /// hopf or change-of-rings.
        #[arg(long, default_value = "hopf")]
        setting: String,
        /// Dimension of Y in the change-of-rings setting.
        #[arg(long, default_value_t = 1)]
        y_dim: usize,
        /// Resolve Y by a padded, non-minimal resolution.
        #[arg(long)]
        padded: bool,
        #[command(flatten)]
        common: Common,
    },
    /// Hopf axioms and identities of a group algebra.
    HopfCheck {
        #[command(flatten)]
        inst: InstanceArgs,
        #[command(flatten)]
        common: Common,
    },
    /// Group cohomology dimensions from a minimal resolution.
    Oracle {
        #[command(flatten)]
        inst: InstanceArgs,
        #[command(flatten)]
        common: Common,
    },
}

fn descriptor(a: &InstanceArgs) -> Result<RunDescriptor, Failure> {
    let mut d = match &a.instance {
        Some(path) => RunDescriptor::load(path)?,
        None => RunDescriptor::default(),
    };
    if let Some(g) = &a.group {
        d.group = Some(GroupSpec::Named(g.clone()));
    }
    if a.p.is_some() {
        d.p = a.p;
    }
    if let Some(s) = &a.subgroup {
        d.subgroup = Some(parse_subgroup(s)?);
    }
    if let Some(m) = &a.module {
        d.module = Some(ModuleSpec::Named(m.clone()));
    }
    if a.degree.is_some() {
        d.degree = a.degree;
    }
    if a.waive {
        d.waive = Some(true);
    }
    Ok(d)
}

fn dispatch(cmd: &Command) -> Result<Outcome, Failure> {
    match cmd {
        Command::Homology { complex, pages, .. } => commands::homology(complex, *pages),
        Command::Resolve { inst, kind, provider, .. } => commands::resolve(&descriptor(inst)?, kind, provider),
        Command::Gss { inst, f, g, no_check, .. } => commands::gss(&descriptor(inst)?, f, g, !no_check),
        Command::Lhs { inst, pages, .. } => {
            let d = descriptor(inst)?;
            let pages = pages.or(d.pages).unwrap_or(3);
            commands::lhs(&d, pages)
        }
        Command::CompareFirst { inst, setting, common } => commands::compare_first(&descriptor(inst)?, setting, common.verbose),
        Command::CompareSecond { inst, setting, y_dim, padded, common } => {
            commands::compare_second(&descriptor(inst)?, setting, *y_dim, *padded, common.verbose)
        }
        Command::HopfCheck { inst, .. } => commands::hopf_check(&descriptor(inst)?),
        Command::Oracle { inst, .. } => commands::oracle(&descriptor(inst)?),
    }
}

fn common(cmd: &Command) -> &Common {
    match cmd {
        Command::Homology { common, .. }
        | Command::Resolve { common, .. }
        | Command::Gss { common, .. }
        | Command::Lhs { common, .. }
        | Command::CompareFirst { common, .. }
        | Command::CompareSecond { common, .. }
        | Command::HopfCheck { common, .. }
        | Command::Oracle { common, .. } => common,
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    match dispatch(&cli.command) {
        Ok(out) => {
            if let Some(path) = &common(&cli.command).out {
                let text = serde_json::to_string_pretty(&out.json).expect("reports serialize") + "\n";
                if let Err(e) = std::fs::write(path, text) {
                    eprintln!("error: cannot write {}: {e}", path.display());
                    return ExitCode::from(1);
                }
            }
            print!("{}", out.text);
            if out.verdict {
                ExitCode::SUCCESS
            } else {
                eprintln!("verdict false");
                ExitCode::from(3)
            }
        }
        Err(Failure::Usage(m)) => {
            eprintln!("usage error: {m}");
            ExitCode::from(1)
        }
        Err(Failure::Hypothesis(m)) => {
            eprintln!("hypothesis failed: {m}");
            ExitCode::from(2)
        }
        Err(Failure::Compute(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(1)
        }
    }
}
