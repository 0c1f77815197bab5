//! The documentation tree: generated pages, links and flag coverage.

use std::collections::HashSet;
use std::fs;
use std::path::{Path, PathBuf};

use clap::CommandFactory;
use fof::cli::Cli;
use fof::docs::{automaton_page, generated_pages};
use fof_core::mesh2fof::TRANSITIONS;

fn root() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../..").canonicalize().unwrap()
}

fn docs() -> PathBuf {
    root().join("docs")
}

#[test]
fn generated_pages_are_current() {
    for (name, contents) in generated_pages() {
        let on_disk = fs::read_to_string(docs().join(name)).unwrap_or_default();
        assert!(on_disk == contents, "docs/{name} is stale; run `fof docs`");
    }
}

#[test]
fn automaton_page_lists_every_transition() {
    let page = automaton_page();
    let rows: Vec<&str> = page
        .lines()
        .skip_while(|l| !l.starts_with("| state |"))
        .skip(2)
        .take_while(|l| l.starts_with('|'))
        .collect();
    assert_eq!(rows.len(), TRANSITIONS.len());
    for (row, t) in rows.iter().zip(&TRANSITIONS) {
        assert!(row.contains(&format!("`{}`", t.symbol.letter())), "{row}");
        assert!(row.starts_with(&format!("| {:?} |", t.from)), "{row}");
        assert!(row.ends_with(&format!("| {:?} |", t.to)), "{row}");
    }
}

/// GitHub-style heading anchor.
fn anchor(heading: &str) -> String {
    heading
        .trim()
        .to_lowercase()
        .chars()
        .filter_map(|c| match c {
            'a'..='z' | '0'..='9' | '-' | '_' => Some(c),
            ' ' => Some('-'),
            _ => None,
        })
        .collect()
}

fn anchors(text: &str) -> HashSet<String> {
    let mut fenced = false;
    let mut out = HashSet::new();
    for line in text.lines() {
        if line.starts_with("```") {
            fenced = !fenced;
        } else if !fenced && line.starts_with('#') {
            out.insert(anchor(line.trim_start_matches('#')));
        }
    }
    out
}

/// Targets of inline `[text](target)` links.
fn links(text: &str) -> Vec<String> {
    let mut out = Vec::new();
    let mut rest = text;
    while let Some(i) = rest.find("](") {
        rest = &rest[i + 2..];
        if let Some(end) = rest.find(')') {
            out.push(rest[..end].to_string());
            rest = &rest[end..];
        }
    }
    out
}

#[test]
fn internal_links_resolve() {
    let mut pages: Vec<PathBuf> = fs::read_dir(docs())
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| p.extension().is_some_and(|e| e == "md"))
        .collect();
    pages.push(root().join("README.md"));
    let mut checked = 0;
    for page in &pages {
        let text = fs::read_to_string(page).unwrap();
        for link in links(&text) {
            if link.starts_with("http://") || link.starts_with("https://") {
                continue;
            }
            let (file, fragment) = link.split_once('#').unwrap_or((&link, ""));
            let target = if file.is_empty() {
                page.clone()
            } else {
                page.parent().unwrap().join(file)
            };
            assert!(target.exists(), "{}: broken link {link}", page.display());
            if !fragment.is_empty() {
                let target_text = fs::read_to_string(&target).unwrap();
                assert!(anchors(&target_text).contains(fragment), "{}: no anchor {link}", page.display());
            }
            checked += 1;
        }
    }
    assert!(checked > 10);
}

#[test]
fn every_flag_is_documented() {
    let cli = fs::read_to_string(docs().join("cli.md")).unwrap();
    let cmd = Cli::command();
    let mut count = 0;
    for sub in cmd.get_subcommands() {
        let heading = format!("## fof {}", sub.get_name());
        let start = cli.find(&heading).unwrap_or_else(|| panic!("no section for {}", sub.get_name()));
        let section = &cli[start + heading.len()..];
        let section = &section[..section.find("\n## ").unwrap_or(section.len())];
        for arg in sub.get_arguments() {
            if let Some(long) = arg.get_long() {
                if long == "help" {
                    continue;
                }
                assert!(section.contains(&format!("`--{long}`")), "fof {} --{long}", sub.get_name());
                count += 1;
            }
        }
    }
    for arg in cmd.get_arguments() {
        if let Some(long) = arg.get_long().filter(|l| *l != "help" && *l != "version") {
            assert!(cli.contains(&format!("`--{long}`")), "--{long}");
        }
    }
    assert!(count > 40);
}

#[test]
fn required_pages_exist() {
    let container = fs::read_to_string(docs().join("container.md")).unwrap();
    assert!(container.contains("FOF1") && container.contains("84 bytes"));
    let reproduction = fs::read_to_string(docs().join("reproduction.md")).unwrap();
    for sweep in ["fof nsweep", "fof ressweep", "fof noisesweep"] {
        assert!(reproduction.contains(sweep), "{sweep}");
    }
    assert!(docs().join("out-of-scope.md").exists());
    assert!(docs().join("conventions.md").exists());
}
