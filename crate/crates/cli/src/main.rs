use std::fs;
use std::io::{self, Read, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::builder::BoolishValueParser;
use clap::{Parser, Subcommand, ValueEnum};
use rand::{Rng, SeedableRng};
use serde::Serialize;

use prymgraph_core::canon::canonical_key;
use prymgraph_core::cover::{enumerate_covers_with, CoverEnumOptions};
use prymgraph_core::fs::{fs_decompositions, quotient_prefilter, vologodsky_bound};
use prymgraph_core::quintic::{config_to_graph, enumerate_configs, enumerate_partitions};
use prymgraph_core::realize::{
    canonical_realization, realization_choices, realize, stabilize, stabilize_by, TailLibrary,
    TailMode,
};
use prymgraph_core::verify::{self, NonFsSettings};
use prymgraph_core::{DoubleCover, DualGraph};

/// Dual graphs of plane quintic degenerations and their double covers.
#[derive(Parser, Debug)]
#[command(name = "prymgraph", version, about)]
struct Cli {
    /// Emit JSON instead of the text summary.
    #[arg(long, global = true, env = "PRYMGRAPH_JSON", value_parser = BoolishValueParser::new())]
    json: bool,

    /// Write output here instead of stdout (a directory for
    /// `enumerate-quintics`).
    #[arg(long, global = true, env = "PRYMGRAPH_OUT")]
    out: Option<PathBuf>,

    /// Worker threads; 0 uses every core.
    #[arg(long, global = true, default_value_t = 0, env = "PRYMGRAPH_THREADS")]
    threads: usize,

    /// Seed for randomized contraction order.
    #[arg(long, global = true, env = "PRYMGRAPH_SEED")]
    seed: Option<u64>,

    /// Drop the timing section from reports.
    #[arg(long, global = true, env = "PRYMGRAPH_NO_TIMING", value_parser = BoolishValueParser::new())]
    no_timing: bool,

    #[command(subcommand)]
    command: Command,
}

#[derive(Copy, Clone, Debug, ValueEnum)]
enum Tails {
    Canonical,
    All,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Genus, first Betti number and component count of a graph.
    Genus {
        /// Graph JSON file, or `-` for stdin.
        graph: PathBuf,
    },
    /// Replace white vertices by tails.
    Realize {
        graph: PathBuf,
        #[arg(long, value_enum, default_value = "canonical")]
        tails: Tails,
        /// Vertex cap per tail with `--tails all`.
        #[arg(
            long,
            visible_alias = "cap-tail",
            default_value_t = 2,
            env = "PRYMGRAPH_CAP_TAIL"
        )]
        cap: usize,
    },
    /// Contract unstable rational vertices.
    Stabilize { graph: PathBuf },
    /// Connected double covers of a graph.
    Covers {
        #[arg(long)]
        base: PathBuf,
        #[arg(long)]
        include_disconnected: bool,
    },
    /// Closure decompositions of a cover.
    FsCheck {
        #[arg(long)]
        cover: PathBuf,
        #[arg(long, default_value_t = 2)]
        n_min: usize,
        /// Include the witnessing decomposition.
        #[arg(long)]
        emit_witness: bool,
    },
    /// Candidate quintic configurations.
    EnumerateQuintics {
        #[arg(long)]
        allowable_only: bool,
        #[arg(
            long,
            visible_alias = "cap-delta",
            default_value_t = 6,
            env = "PRYMGRAPH_CAP_DELTA"
        )]
        delta_cap: u32,
    },
    /// No stable cover of a quintic configuration lies in a closure with n >= 2.
    VerifyNonfs {
        #[arg(long)]
        allowable_only: bool,
        #[arg(
            long,
            visible_alias = "cap-tail",
            default_value_t = 2,
            env = "PRYMGRAPH_CAP_TAIL"
        )]
        tail_cap: usize,
        #[arg(
            long,
            visible_alias = "cap-delta",
            default_value_t = 6,
            env = "PRYMGRAPH_CAP_DELTA"
        )]
        delta_cap: u32,
        /// Add the FS fixture with this n to the checked covers (repeatable).
        #[arg(long)]
        inject_fs: Vec<usize>,
        /// Also search realized covers before stabilization.
        #[arg(long)]
        check_realized: bool,
    },
    /// Properly étale covers of forests.
    VerifyTreeLemma {
        #[arg(
            long,
            visible_alias = "cap-vertices",
            default_value_t = 10,
            env = "PRYMGRAPH_CAP_VERTICES"
        )]
        max_vertices: usize,
    },
    /// Torus rank of covers of quintics with one A1 and one A2.
    VerifyLemmaA2 {
        #[arg(
            long,
            visible_alias = "cap-tail",
            default_value_t = 2,
            env = "PRYMGRAPH_CAP_TAIL"
        )]
        tail_cap: usize,
    },
    /// Recompute the boundary divisor dimension table.
    StrataTable,
    /// Rebuild the worked examples and compare with goldens.
    Examples,
}

/// What a command produced: the document to print and whether it passed.
struct Outcome {
    json: serde_json::Value,
    text: String,
    passed: bool,
}

impl Outcome {
    fn ok(json: serde_json::Value, text: String) -> Self {
        Self {
            json,
            text,
            passed: true,
        }
    }
}

fn read_input(path: &Path) -> Result<String> {
    if path.as_os_str() == "-" {
        let mut s = String::new();
        io::stdin().read_to_string(&mut s)?;
        Ok(s)
    } else {
        fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
    }
}

fn read_graph(path: &Path) -> Result<DualGraph> {
    Ok(DualGraph::from_json_str(&read_input(path)?)?)
}

fn report_json<T: Serialize>(report: &T, no_timing: bool) -> Result<serde_json::Value> {
    if no_timing {
        Ok(verify::without_timing(report)?)
    } else {
        Ok(serde_json::to_value(report)?)
    }
}

fn status_line(passed: bool) -> &'static str {
    if passed {
        "PASSED"
    } else {
        "FAILED"
    }
}

fn run(cli: &Cli) -> Result<Outcome> {
    match &cli.command {
        Command::Genus { graph } => {
            let g = read_graph(graph)?;
            let json = serde_json::json!({
                "genus": g.genus()?,
                "first_betti": g.first_betti()?,
                "components": g.component_count(),
            });
            let text = format!(
                "genus {}\nfirst Betti number {}\ncomponents {}",
                json["genus"], json["first_betti"], json["components"]
            );
            Ok(Outcome::ok(json, text))
        }
        Command::Realize { graph, tails, cap } => {
            let g = read_graph(graph)?;
            let types: Vec<_> = g
                .white_vertices()
                .into_iter()
                .filter_map(|w| g.vertex(w).sing)
                .collect();
            let mode = match tails {
                Tails::Canonical => TailMode::Canonical,
                Tails::All => TailMode::All { cap: *cap },
            };
            let lib = TailLibrary::for_types(mode, &types)?;
            let realized = match tails {
                Tails::Canonical => vec![realize(&g, &canonical_realization(&g, &lib)?)?],
                Tails::All => {
                    let mut seen = std::collections::BTreeSet::new();
                    let mut out = Vec::new();
                    for choice in realization_choices(&g, &lib)? {
                        let r = realize(&g, &choice)?;
                        if seen.insert(canonical_key(&r)?) {
                            out.push(r);
                        }
                    }
                    out
                }
            };
            let docs: Vec<_> = realized.iter().map(DualGraph::to_json_value).collect();
            let json = if docs.len() == 1 {
                serde_json::to_value(&docs[0])?
            } else {
                serde_json::to_value(&docs)?
            };
            let text = if realized.len() == 1 {
                serde_json::to_string_pretty(&json)?
            } else {
                format!("{} distinct realizations", realized.len())
            };
            Ok(Outcome::ok(json, text))
        }
        Command::Stabilize { graph } => {
            let g = read_graph(graph)?;
            let s = match cli.seed {
                Some(seed) => {
                    let mut rng = rand::rngs::StdRng::seed_from_u64(seed);
                    stabilize_by(&g, |c| rng.gen_range(0..c.len()))?
                }
                None => stabilize(&g)?,
            };
            let json = serde_json::to_value(s.to_json_value())?;
            let text = serde_json::to_string_pretty(&json)?;
            Ok(Outcome::ok(json, text))
        }
        Command::Covers {
            base,
            include_disconnected,
        } => {
            let g = read_graph(base)?;
            let covers = enumerate_covers_with(
                &g,
                CoverEnumOptions {
                    include_disconnected: *include_disconnected,
                },
            )?;
            let json = serde_json::to_value(
                covers
                    .iter()
                    .map(DoubleCover::to_json_value)
                    .collect::<Vec<_>>(),
            )?;
            let mut text = format!("{} covers", covers.len());
            for (i, c) in covers.iter().enumerate() {
                let conn = if c.is_connected() {
                    "connected"
                } else {
                    "disconnected"
                };
                text.push_str(&format!(
                    "\n{i}: {} vertices, {} edges, {conn}",
                    c.total().vertex_count(),
                    c.total().edge_count()
                ));
                if g.is_realized() && c.is_connected() {
                    let p = c.prym_profile()?;
                    text.push_str(&format!(
                        ", abelian {} torus {}",
                        p.abelian_dim, p.torus_rank
                    ));
                }
            }
            Ok(Outcome::ok(json, text))
        }
        Command::FsCheck {
            cover,
            n_min,
            emit_witness,
        } => {
            let c = DoubleCover::from_json_str(&read_input(cover)?)?;
            c.validate()?;
            let decomps = fs_decompositions(&c)?;
            let witness = decomps.iter().rev().find(|d| d.n >= *n_min);
            let mut json = serde_json::json!({
                "in_closure": witness.is_some(),
                "n_min": n_min,
                "max_n": decomps.iter().map(|d| d.n).max().unwrap_or(0),
                "decompositions": decomps.len(),
                "quotient_prefilter": quotient_prefilter(&c),
                "vologodsky_bound": vologodsky_bound(&c)?,
            });
            if *emit_witness {
                json["witness"] = serde_json::to_value(witness)?;
            }
            let text = format!(
                "in closure (n >= {n_min}): {}\nlargest n: {}\nquotient prefilter: {}\nVologodsky bound: {}",
                json["in_closure"], json["max_n"], json["quotient_prefilter"], json["vologodsky_bound"]
            );
            Ok(Outcome {
                json,
                text,
                passed: witness.is_none(),
            })
        }
        Command::EnumerateQuintics {
            allowable_only,
            delta_cap,
        } => {
            let configs = enumerate_configs(*allowable_only, *delta_cap)?;
            let mut per_partition = std::collections::BTreeMap::new();
            for p in enumerate_partitions() {
                let label = p.iter().map(u8::to_string).collect::<Vec<_>>().join("+");
                per_partition.insert(label, 0usize);
            }
            for c in &configs {
                *per_partition.entry(c.partition_label()).or_default() += 1;
            }
            let mut files = Vec::new();
            if let Some(dir) = &cli.out {
                fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
                for (i, c) in configs.iter().enumerate() {
                    let name = format!("config_{i:05}.json");
                    let doc = serde_json::json!({
                        "config": c,
                        "graph": config_to_graph(c).to_json_value(),
                    });
                    fs::write(dir.join(&name), serde_json::to_string_pretty(&doc)? + "\n")?;
                    files.push(name);
                }
            }
            let json = serde_json::json!({
                "allowable_only": allowable_only,
                "delta_cap": delta_cap,
                "total": configs.len(),
                "per_partition": per_partition,
                "files": files,
            });
            let mut text = format!("{} configurations", configs.len());
            for (k, v) in &per_partition {
                text.push_str(&format!("\n  {k}: {v}"));
            }
            Ok(Outcome::ok(json, text))
        }
        Command::VerifyNonfs {
            allowable_only,
            tail_cap,
            delta_cap,
            inject_fs,
            check_realized,
        } => {
            let settings = NonFsSettings {
                allowable_only: *allowable_only,
                tail_cap: *tail_cap,
                delta_cap: *delta_cap,
                inject_fs: inject_fs.clone(),
                check_realized: *check_realized,
            };
            let r = verify::verify_nonfs(&settings)?;
            let mut text = format!(
                "verify-nonfs: {}\nconfigurations {}\ncovers {}\ncover and tail pairs {}\nrealized covers {}\nstable covers {}\nwitnesses with n >= 2: {}",
                status_line(r.status.passed()),
                r.configs_total,
                r.covers_total,
                r.tail_choices_total,
                r.realized_covers_total,
                r.stable_covers_total,
                r.witnesses.len()
            );
            for w in &r.witnesses {
                text.push_str(&format!("\n  {}: n = {}", w.source, w.n));
            }
            for i in &r.injected {
                text.push_str(&format!(
                    "\ninjected FS_{}: detected n = {}",
                    i.expected_n,
                    i.found_n.map_or("none".into(), |n| n.to_string())
                ));
            }
            Ok(Outcome {
                json: report_json(&r, cli.no_timing)?,
                text,
                passed: r.status.passed(),
            })
        }
        Command::VerifyTreeLemma { max_vertices } => {
            let r = verify::verify_tree_lemma(*max_vertices)?;
            let text = format!(
                "verify-tree-lemma: {}\nforests {}\ncovers checked {}\ncounterexamples {}",
                status_line(r.status.passed()),
                r.forests_per_k.values().sum::<usize>(),
                r.covers_checked,
                r.counterexamples.len()
            );
            Ok(Outcome {
                json: report_json(&r, cli.no_timing)?,
                text,
                passed: r.status.passed(),
            })
        }
        Command::VerifyLemmaA2 { tail_cap } => {
            let r = verify::verify_lemma_a2(*tail_cap)?;
            let mut text = format!(
                "verify-lemma-a2: {}\nirreducible configurations {}\nstable covers {}\nviolations {}",
                status_line(r.status.passed()),
                r.irreducible_configs,
                r.irreducible_stable_covers,
                r.violations.len()
            );
            for (k, v) in &r.irreducible_profiles {
                text.push_str(&format!("\n  profile {k}: {v}"));
            }
            text.push_str(&format!(
                "\nreducible configurations (not asserted) {}",
                r.geometrically_excluded.configs
            ));
            Ok(Outcome {
                json: report_json(&r, cli.no_timing)?,
                text,
                passed: r.status.passed(),
            })
        }
        Command::StrataTable => {
            let r = verify::strata_table()?;
            let mut text = format!("strata-table: {}", status_line(r.status.passed()));
            for row in &r.rows {
                let compact = row
                    .compact
                    .iter()
                    .map(u32::to_string)
                    .collect::<Vec<_>>()
                    .join("+");
                let ext = row.extension_dim.map_or("-".into(), |d| d.to_string());
                text.push_str(&format!(
                    "\n  {:<7} compact {compact:<5} extension {ext:<2} total {} {}",
                    row.name,
                    row.total,
                    if row.matches { "ok" } else { "MISMATCH" }
                ));
            }
            Ok(Outcome {
                json: serde_json::to_value(&r)?,
                text,
                passed: r.status.passed(),
            })
        }
        Command::Examples => {
            let r = verify::run_examples()?;
            let mut text = format!("examples: {}", status_line(r.status.passed()));
            for c in &r.checks {
                text.push_str(&format!(
                    "\n  {:<28} genus {} {}",
                    c.name,
                    c.genus,
                    if c.passed { "ok" } else { "MISMATCH" }
                ));
            }
            for (k, v) in &r.profiles {
                text.push_str(&format!("\n  {k} Prym profile {v}"));
            }
            Ok(Outcome {
                json: serde_json::to_value(&r)?,
                text,
                passed: r.status.passed(),
            })
        }
    }
}

fn emit(cli: &Cli, outcome: &Outcome) -> Result<()> {
    let body = if cli.json {
        serde_json::to_string_pretty(&outcome.json)? + "\n"
    } else {
        outcome.text.clone() + "\n"
    };
    let writes_dir = matches!(cli.command, Command::EnumerateQuintics { .. });
    match &cli.out {
        Some(path) if !writes_dir => {
            fs::write(path, body).with_context(|| format!("writing {}", path.display()))?
        }
        Some(dir) => fs::write(
            dir.join("manifest.json"),
            serde_json::to_string_pretty(&outcome.json)? + "\n",
        )?,
        None => io::stdout().write_all(body.as_bytes())?,
    }
    if writes_dir && cli.out.is_some() && !cli.json {
        io::stdout().write_all((outcome.text.clone() + "\n").as_bytes())?;
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = (|| -> Result<bool> {
        if cli.threads > 0 {
            rayon::ThreadPoolBuilder::new()
                .num_threads(cli.threads)
                .build_global()
                .context("configuring the thread pool")?;
        }
        let outcome = run(&cli)?;
        emit(&cli, &outcome)?;
        Ok(outcome.passed)
    })();
    match result {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
