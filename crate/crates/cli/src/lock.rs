//! Single-writer ownership of an output directory.
//!
//! Every subcommand that writes into `--out` takes the lock first, so two
//! concurrent invocations cannot interleave partial files. The lock is a
//! `create_new` file holding the owner's pid; dropping the guard removes it.
//! A crash can leave the file behind, so the contention message names it.

use std::fs::OpenOptions;
use std::io::Write;
use std::path::{Path, PathBuf};

use crate::error::CliError;

pub const LOCK_FILE_NAME: &str = ".cascade.lock";

#[derive(Debug)]
pub struct OutDirLock {
    path: PathBuf,
}

impl OutDirLock {
    pub fn acquire(out_dir: &Path) -> Result<OutDirLock, CliError> {
        std::fs::create_dir_all(out_dir)?;
        let path = out_dir.join(LOCK_FILE_NAME);
        match OpenOptions::new().write(true).create_new(true).open(&path) {
            Ok(mut file) => {
                let _ = write!(file, "{}", std::process::id());
                Ok(OutDirLock { path })
            }
            Err(err) if err.kind() == std::io::ErrorKind::AlreadyExists => {
                Err(CliError::runtime(format!(
                    "output directory {} is owned by another process; remove {} if that process is gone",
                    out_dir.display(),
                    path.display(),
                )))
            }
            Err(err) => Err(err.into()),
        }
    }
}

impl Drop for OutDirLock {
    fn drop(&mut self) {
        let _ = std::fs::remove_file(&self.path);
    }
}
