//! `fsets catalog ...`.

use std::path::PathBuf;

use clap::{Args, Subcommand};
use fsets::catalog::{Catalog, Filter, StatusKind, CATALOG_ENV, SEED_EQUATIONS};
use fsets::Field;

use crate::fs_cmd::FsArtifact;
use crate::input::read_json;

#[derive(Args, Debug)]
pub struct CatalogArgs {
    /// Catalog directory.
    #[arg(long, env = CATALOG_ENV, default_value = "catalog")]
    pub root: PathBuf,
    #[command(subcommand)]
    pub command: CatalogCommand,
}

#[derive(Subcommand, Debug)]
pub enum CatalogCommand {
    /// Add the definitions in a file; equal equations are not duplicated.
    Ingest { file: PathBuf },
    /// Add the bundled worked equations.
    Seed,
    /// List records matching every given filter.
    Query {
        #[arg(long)]
        family: Option<String>,
        /// real or complex.
        #[arg(long)]
        field: Option<String>,
        #[arg(long)]
        closed_form: Option<bool>,
        /// exact, float or unverified.
        #[arg(long)]
        status: Option<StatusKind>,
        /// Print full records as JSON.
        #[arg(long)]
        json: bool,
    },
    /// Attach the result in an `fs.json` to a record.
    Attach {
        id: String,
        fs_json: PathBuf,
        /// Generator name stored with the result (default: the artifact's).
        #[arg(long)]
        generator: Option<String>,
    },
    /// Print a record.
    Show {
        id: String,
        #[arg(long)]
        version: Option<u32>,
    },
    /// Print every definition as one multi-definition file.
    Export,
    /// Record a relation between two records, in both.
    Link {
        a: String,
        b: String,
        #[arg(long, default_value = "related")]
        kind: String,
    },
}

fn parse_field(s: &str) -> anyhow::Result<Field> {
    match s {
        "real" => Ok(Field::Real),
        "complex" => Ok(Field::Complex),
        _ => Err(fsets::Error::Invalid(format!("unknown field {s:?}")).into()),
    }
}

fn report_ingest(items: &[fsets::catalog::Ingested]) {
    for i in items {
        let r = &i.record;
        println!(
            "{} {} {} {}",
            r.id,
            if i.created { "new" } else { "existing" },
            r.family,
            r.name.as_deref().unwrap_or("-")
        );
    }
}

pub fn run(a: &CatalogArgs) -> anyhow::Result<()> {
    let cat = Catalog::open(&a.root)?;
    match &a.command {
        CatalogCommand::Ingest { file } => {
            let text = std::fs::read_to_string(file)?;
            report_ingest(&cat.ingest(&text)?);
        }
        CatalogCommand::Seed => report_ingest(&cat.ingest(SEED_EQUATIONS)?),
        CatalogCommand::Query { family, field, closed_form, status, json } => {
            let filter = Filter {
                family: family.clone(),
                field: field.as_deref().map(parse_field).transpose()?,
                has_closed_form: *closed_form,
                status: *status,
            };
            let recs = cat.query(&filter)?;
            if *json {
                println!("{}", serde_json::to_string_pretty(&recs)?);
            } else {
                for r in &recs {
                    println!(
                        "{} v{} {} order {} closed_form {} results {} {}",
                        r.id,
                        r.version,
                        r.family,
                        r.order,
                        r.has_closed_form,
                        r.results.len(),
                        r.name.as_deref().unwrap_or("-")
                    );
                }
            }
        }
        CatalogCommand::Attach { id, fs_json, generator } => {
            let art: FsArtifact = read_json(fs_json)?;
            let gen = generator.clone().unwrap_or_else(|| art.generator.clone());
            let rec = cat.attach_result(id, &gen, art.description, &art.verification)?;
            println!("{} v{}: {} results", rec.id, rec.version, rec.results.len());
        }
        CatalogCommand::Show { id, version } => {
            let rec = match version {
                Some(v) => cat.get_version(id, *v)?,
                None => cat.get(id)?,
            };
            println!("{}", serde_json::to_string_pretty(&rec)?);
        }
        CatalogCommand::Export => print!("{}", cat.export()?),
        CatalogCommand::Link { a: x, b: y, kind } => {
            cat.link(x, y, kind)?;
            println!("linked {x} <-> {y} ({kind})");
        }
    }
    Ok(())
}
