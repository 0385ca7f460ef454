use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use serde::Serialize;
use serde_json::json;

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

/// Writes the artifacts of one command, each stamped with the config hash.
pub struct Output {
    dir: PathBuf,
    command: &'static str,
    sha256: String,
    format: Format,
}

impl Output {
    pub fn new(dir: &Path, command: &'static str, sha256: String, format: Format) -> Result<Self> {
        std::fs::create_dir_all(dir).with_context(|| format!("creating output directory {}", dir.display()))?;
        Ok(Output { dir: dir.to_path_buf(), command, sha256, format })
    }

    fn write(&self, name: String, bytes: Vec<u8>) -> Result<()> {
        let path = self.dir.join(name);
        std::fs::write(&path, bytes).with_context(|| format!("writing {}", path.display()))?;
        println!("wrote {}", path.display());
        Ok(())
    }

    /// A table: CSV with a `#` header line naming the config hash, or JSON.
    pub fn series<T: Serialize>(&self, stem: &str, rows: &[T]) -> Result<()> {
        match self.format {
            Format::Csv => {
                let mut bytes = format!("# cocycle-lab {} config_sha256={}\n", self.command, self.sha256).into_bytes();
                {
                    let mut w = csv::Writer::from_writer(&mut bytes);
                    for r in rows {
                        w.serialize(r)?;
                    }
                    w.flush()?;
                }
                self.write(format!("{stem}.csv"), bytes)
            }
            Format::Json => self.json(stem, rows),
        }
    }

    /// A certificate or report, always JSON.
    pub fn json<T: Serialize + ?Sized>(&self, stem: &str, value: &T) -> Result<()> {
        let doc = json!({ "command": self.command, "config_sha256": self.sha256, "result": value });
        let mut bytes = serde_json::to_vec_pretty(&doc)?;
        bytes.push(b'\n');
        self.write(format!("{stem}.json"), bytes)
    }
}
