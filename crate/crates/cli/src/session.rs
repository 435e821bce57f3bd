//! Running statements from scripts and interactive input.

use std::collections::BTreeMap;
use std::io::{self, BufRead, Write};
use std::path::PathBuf;

use gqlengine::exec::{CreateSummary, Executed, Outcome};
use gqlengine::syntax::{parse_tokens, split_script, Pos, SyntaxError};
use gqlengine::{Database, ExecError};
use thiserror::Error;

use crate::bundle::{load_bundle, BundleError};
use crate::params::{substitute_parameters, MissingParameter};
use crate::render::{render_table, Format};

#[derive(Clone, Debug, Default)]
pub struct SessionConfig {
    /// Bundle to load; an empty store when `None`.
    pub graph: Option<PathBuf>,
    pub params: BTreeMap<String, String>,
    pub stats: bool,
    pub format: Format,
}

#[derive(Debug, Error)]
pub enum StatementError {
    #[error(transparent)]
    Params(#[from] MissingParameter),
    #[error(transparent)]
    Syntax(#[from] SyntaxError),
    #[error("{pos}: {source}")]
    Exec {
        pos: Pos,
        #[source]
        source: ExecError,
    },
    #[error(transparent)]
    Io(#[from] io::Error),
}

pub struct Session {
    db: Database,
    config: SessionConfig,
}

impl Session {
    pub fn open(config: SessionConfig) -> Result<Session, BundleError> {
        let db = match &config.graph {
            Some(dir) => Database::from_store(load_bundle(dir)?.store),
            None => Database::new(),
        };
        Ok(Session { db, config })
    }

    pub fn database(&self) -> &Database {
        &self.db
    }

    /// Runs every statement of `text` in order and stops at the first error.
    pub fn run_script(&mut self, text: &str, out: &mut dyn Write) -> Result<(), StatementError> {
        let text = substitute_parameters(text, &self.config.params)?;
        let chunks = split_script(&text)?;
        for (i, chunk) in chunks.into_iter().enumerate() {
            if i > 0 {
                writeln!(out)?;
            }
            let pos = chunk.start();
            let stmt = parse_tokens(chunk.tokens)?;
            let done = self
                .db
                .execute(&stmt)
                .map_err(|source| StatementError::Exec { pos, source })?;
            self.print(&done, out)?;
        }
        Ok(())
    }

    fn print(&self, done: &Executed, out: &mut dyn Write) -> io::Result<()> {
        match &done.outcome {
            Outcome::Table(t) => out.write_all(render_table(t, self.config.format).as_bytes())?,
            Outcome::Created(s) => writeln!(out, "{}", created_line(s))?,
        }
        if self.config.stats {
            writeln!(
                out,
                "-- edges examined: {}, states generated: {}",
                done.stats.edges_examined, done.stats.states_generated
            )?;
        }
        Ok(())
    }

    /// Reads statements from `input`, each ending at a `;` or an empty
    /// line, and runs them. Errors are reported and the loop continues.
    pub fn repl(&mut self, input: &mut dyn BufRead, out: &mut dyn Write, err: &mut dyn Write, prompt: bool) -> io::Result<()> {
        let mut pending = String::new();
        loop {
            if prompt {
                write!(out, "{}", if pending.is_empty() { "SQL> " } else { "...> " })?;
                out.flush()?;
            }
            let mut line = String::new();
            let eof = input.read_line(&mut line)? == 0;
            let blank = line.trim().is_empty();
            if !blank {
                pending.push_str(&line);
            }
            let complete = eof || (blank && !pending.trim().is_empty()) || line.trim_end().ends_with(';');
            if complete && !pending.trim().is_empty() {
                let text = std::mem::take(&mut pending);
                if let Err(e) = self.run_script(&text, out) {
                    writeln!(err, "error: {e}")?;
                }
            }
            if eof {
                return Ok(());
            }
        }
    }
}

fn created_line(s: &CreateSummary) -> String {
    format!(
        "created {} node(s), {} edge(s), {} type(s)",
        s.nodes_created, s.edges_created, s.types_created
    )
}
