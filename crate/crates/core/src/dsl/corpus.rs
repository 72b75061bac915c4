use std::fs;
use std::path::Path;

use super::{canonical, run_source, OutputRecord, RunConfig};
use crate::error::{Error, Result};

/// Output of a run as it is printed and stored in golden files.
pub fn render(records: &[OutputRecord], json: bool) -> String {
    let mut s = String::new();
    for r in records {
        if json {
            s.push_str(&r.to_json().to_string());
            s.push('\n');
        } else {
            s.push_str(&r.text());
        }
    }
    s
}

#[derive(Clone, Debug)]
pub struct CorpusResult {
    pub name: String,
    pub ok: bool,
    pub message: String,
}

fn golden_ext(json: bool) -> &'static str {
    if json {
        "json"
    } else {
        "out"
    }
}

/// Runs every `*.hf` program in `dir` twice and compares against its golden
/// file; with `bless` the golden files are rewritten instead.
pub fn check_corpus(dir: &Path, config: &RunConfig, json: bool, bless: bool) -> Result<Vec<CorpusResult>> {
    let io = |e: std::io::Error| Error::Invalid(format!("{}: {e}", dir.display()));
    let mut files: Vec<_> = fs::read_dir(dir)
        .map_err(io)?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|x| x == "hf"))
        .collect();
    files.sort();
    let mut out = Vec::new();
    for path in files {
        let name = path.file_stem().unwrap_or_default().to_string_lossy().into_owned();
        let src = fs::read_to_string(&path).map_err(io)?;
        let res = check_one(&path, &src, config, json, bless);
        out.push(match res {
            Ok(()) => CorpusResult {
                name,
                ok: true,
                message: String::new(),
            },
            Err(m) => CorpusResult {
                name,
                ok: false,
                message: m,
            },
        });
    }
    Ok(out)
}

fn check_one(path: &Path, src: &str, config: &RunConfig, json: bool, bless: bool) -> std::result::Result<(), String> {
    let once = canonical(src).map_err(|e| e.to_string())?;
    if canonical(&once).map_err(|e| e.to_string())? != once {
        return Err("print/parse is not a fixpoint".into());
    }
    let first = render(&run_source(src, config.clone()).map_err(|e| e.to_string())?, json);
    let second = render(&run_source(&once, config.clone()).map_err(|e| e.to_string())?, json);
    if first != second {
        return Err("output differs between runs".into());
    }
    let golden = path.with_extension(golden_ext(json));
    if bless {
        return fs::write(&golden, &first).map_err(|e| e.to_string());
    }
    let want = fs::read_to_string(&golden).map_err(|e| format!("{}: {e}", golden.display()))?;
    if want != first {
        let line = want
            .lines()
            .zip(first.lines())
            .position(|(a, b)| a != b)
            .unwrap_or_else(|| want.lines().count().min(first.lines().count()));
        return Err(format!("differs from {} at line {}", golden.display(), line + 1));
    }
    Ok(())
}
