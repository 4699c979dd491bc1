//! One command run: the manifest it will write and the files it produces.

use std::path::{Path, PathBuf};

use pomdp_voi::io::RunManifest;
use pomdp_voi::Result;
use serde::Serialize;

pub struct Job {
    manifest: RunManifest,
    out: PathBuf,
    stem: String,
    files: Vec<(String, String)>,
}

impl Job {
    /// `outputs` are file names inside `out`, known before computing so
    /// that a dry run can list them.
    pub fn new<P: Serialize>(command: &str, params: &P, inputs: Vec<PathBuf>, out: &Path, outputs: &[String]) -> Self {
        let parameters = serde_json::to_value(params).expect("arguments serialise");
        let mut manifest = RunManifest::new(command, parameters);
        manifest.inputs = inputs;
        manifest.outputs = outputs.iter().map(|f| out.join(f)).collect();
        Job {
            manifest,
            out: out.to_path_buf(),
            stem: command.to_string(),
            files: Vec::new(),
        }
    }

    /// Names the manifest `<stem>.manifest.json` instead of after the
    /// command, so several runs of one command can share a directory.
    pub fn with_stem(mut self, stem: &str) -> Self {
        self.stem = stem.to_string();
        self
    }

    /// Prints the manifest; returns true when the caller should stop.
    pub fn dry_run(&self, dry: bool) -> bool {
        if dry {
            println!("{}", self.manifest.to_json());
        }
        dry
    }

    pub fn add(&mut self, name: &str, contents: String) {
        let path = self.out.join(name);
        debug_assert!(self.manifest.outputs.contains(&path), "{name} missing from the manifest");
        self.files.push((name.to_string(), contents));
    }

    /// Writes every file, then the manifest next to them.
    pub fn finish(self) -> Result<()> {
        std::fs::create_dir_all(&self.out)?;
        for (name, contents) in &self.files {
            std::fs::write(self.out.join(name), contents)?;
        }
        let manifest_path = self.out.join(format!("{}.manifest.json", self.stem));
        let mut text = self.manifest.to_json();
        text.push('\n');
        std::fs::write(manifest_path, text)?;
        Ok(())
    }
}
