//! Documentation pages generated from the code: the matcher's transition
//! table and the command-line reference.

use std::fmt::Write as _;
use std::path::Path;

use anyhow::{Context, Result};
use clap::CommandFactory;
use fof_core::mesh2fof::{Action, State, Symbol, TRANSITIONS};

use crate::cli::Cli;

const GENERATED: &str = "<!-- Generated by `fof docs`. Do not edit by hand. -->";

fn state_name(s: State) -> &'static str {
    match s {
        State::Outside => "Outside",
        State::Inside => "Inside",
    }
}

fn action_name(a: Action) -> &'static str {
    match a {
        Action::Emit => "keep event",
        Action::Drop => "drop event",
        Action::Accept => "accept",
        Action::RetractEnter => "retract last kept enter",
    }
}

fn symbol_meaning(s: Symbol) -> &'static str {
    match s {
        Symbol::Enter => "enter (surface faces the camera)",
        Symbol::Exit => "exit (surface faces away)",
        Symbol::Stop => "end of the pixel's events",
    }
}

/// `automaton.md`, built from [`TRANSITIONS`].
pub fn automaton_page() -> String {
    let mut s = String::new();
    s.push_str("# Discontinuity matcher\n\n");
    s.push_str(GENERATED);
    s.push_str("\n\n");
    s.push_str(
        "Each pixel's crossing events, sorted by depth, are read as a word over the\n\
         letters below and filtered so that the kept events alternate enter/exit,\n\
         starting with an enter and ending with an exit. Within a run of equal\n\
         letters the first event is kept. See [conventions](conventions.md) for the\n\
         orientation rule.\n\n",
    );
    s.push_str("| letter | meaning |\n|---|---|\n");
    for sym in [Symbol::Enter, Symbol::Exit, Symbol::Stop] {
        let _ = writeln!(s, "| `{}` | {} |", sym.letter(), symbol_meaning(sym));
    }
    s.push_str("\n## Transitions\n\n| state | letter | action | next state |\n|---|---|---|---|\n");
    for t in &TRANSITIONS {
        let _ = writeln!(
            s,
            "| {} | `{}` | {} | {} |",
            state_name(t.from),
            t.symbol.letter(),
            action_name(t.action),
            state_name(t.to)
        );
    }
    s.push_str("\n## Diagram\n\n```mermaid\nstateDiagram-v2\n    [*] --> Outside\n");
    for t in &TRANSITIONS {
        let target = if t.symbol == Symbol::Stop {
            "[*]"
        } else {
            state_name(t.to)
        };
        let _ = writeln!(
            s,
            "    {} --> {}: {} / {}",
            state_name(t.from),
            target,
            t.symbol.letter(),
            action_name(t.action)
        );
    }
    s.push_str("```\n");
    s
}

fn escape(text: &str) -> String {
    text.replace('|', "\\|").replace('\n', " ")
}

/// `cli.md`, built from the argument definitions.
pub fn cli_page() -> String {
    let mut root = Cli::command();
    root.build();
    let mut s = String::new();
    s.push_str("# Command-line reference\n\n");
    s.push_str(GENERATED);
    s.push_str("\n\n");
    s.push_str(
        "Exit codes: `0` success, `1` runtime failure, `2` usage error (bad flags,\n\
         missing input file, out-of-range values). Logs go to standard error; set\n\
         `FOF_LOG` (e.g. `FOF_LOG=debug`) for finer control than `-v`/`-q`.\n\n\
         Distances are in normalized units unless `--scale` is given. Repair modes\n\
         are described in [conventions](conventions.md#extraction), the `.fof` layout\n\
         in [the container page](container.md) and the sweeps in\n\
         [reproduction](reproduction.md).\n\n",
    );
    s.push_str("## Global options\n\n");
    write_args(&mut s, &root, true);
    for sub in root.get_subcommands() {
        if sub.get_name() == "help" {
            continue;
        }
        let _ = writeln!(s, "\n## fof {}\n", sub.get_name());
        if let Some(about) = sub.get_about() {
            let _ = writeln!(s, "{about}\n");
        }
        let usage = sub.clone().render_usage().to_string();
        let _ = writeln!(s, "```text\n{}\n```\n", usage.trim_start_matches("Usage: "));
        write_args(&mut s, sub, false);
    }
    s
}

fn write_args(s: &mut String, cmd: &clap::Command, globals: bool) {
    s.push_str("| argument | default | description |\n|---|---|---|\n");
    for arg in cmd.get_arguments() {
        let id = arg.get_id().as_str();
        if id == "help" || id == "version" {
            continue;
        }
        if arg.is_global_set() != globals {
            continue;
        }
        let name = match (arg.get_short(), arg.get_long()) {
            (Some(c), Some(l)) => format!("`-{c}`, `--{l}`"),
            (None, Some(l)) => format!("`--{l}`"),
            (Some(c), None) => format!("`-{c}`"),
            (None, None) => format!("`<{}>`", id.to_uppercase()),
        };
        let value = arg
            .get_value_names()
            .and_then(|v| v.first())
            .map(|v| format!(" `<{v}>`"))
            .filter(|_| arg.get_long().is_some() && arg.get_action().takes_values())
            .unwrap_or_default();
        let default: Vec<String> = arg
            .get_default_values()
            .iter()
            .map(|v| v.to_string_lossy().into_owned())
            .collect();
        let default = if default.is_empty() || !arg.get_action().takes_values() {
            String::new()
        } else {
            format!("`{}`", default.join(","))
        };
        let mut help = arg.get_long_help().or(arg.get_help()).map(|h| h.to_string()).unwrap_or_default();
        let values: Vec<String> = arg
            .get_possible_values()
            .iter()
            .filter(|v| !v.is_hide_set())
            .map(|v| format!("`{}`", v.get_name()))
            .collect();
        if !values.is_empty() {
            let _ = write!(help, " One of {}.", values.join(", "));
        }
        let _ = writeln!(s, "| {name}{value} | {default} | {} |", escape(help.trim()));
    }
}

/// Every generated page as `(file name, contents)`.
pub fn generated_pages() -> Vec<(&'static str, String)> {
    vec![("automaton.md", automaton_page()), ("cli.md", cli_page())]
}

/// Writes the generated pages into `dir`, or with `check` only compares
/// them. Returns the names of pages that differed.
pub fn write_generated(dir: &Path, check: bool) -> Result<Vec<String>> {
    let mut stale = Vec::new();
    for (name, contents) in generated_pages() {
        let path = dir.join(name);
        let current = std::fs::read_to_string(&path).ok();
        if current.as_deref() == Some(contents.as_str()) {
            continue;
        }
        stale.push(name.to_string());
        if !check {
            std::fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
            std::fs::write(&path, contents).with_context(|| format!("writing {}", path.display()))?;
            log::info!("wrote {}", path.display());
        }
    }
    Ok(stale)
}
