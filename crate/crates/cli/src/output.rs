use std::io::Write;
use std::path::Path;

use tempfile::NamedTempFile;

use crate::{CliError, Settings};

/// Shortest fixed-width form that round-trips every double.
pub fn num(x: f64) -> String {
    format!("{x:.16e}")
}

/// `# ...` line identifying the tool version and numerical settings.
pub fn metadata_line(command: &str, settings: &Settings) -> String {
    format!(
        "# {} {} command={} rel_tol={:e} norm_tol={:e} seed={}",
        env!("CARGO_PKG_NAME"),
        env!("CARGO_PKG_VERSION"),
        command,
        settings.numerics.rel_tol,
        settings.numerics.norm_tol,
        settings.seed.map_or_else(|| "none".to_string(), |s| s.to_string()),
    )
}

pub fn metadata_json(command: &str, settings: &Settings) -> serde_json::Value {
    serde_json::json!({
        "tool": env!("CARGO_PKG_NAME"),
        "version": env!("CARGO_PKG_VERSION"),
        "command": command,
        "rel_tol": settings.numerics.rel_tol,
        "norm_tol": settings.numerics.norm_tol,
        "seed": settings.seed,
    })
}

/// Writes `content` to `path` through a temporary file in the same
/// directory, or to stdout when no path is given.
pub fn emit(path: Option<&Path>, content: &str) -> Result<(), CliError> {
    let Some(path) = path else {
        let mut out = std::io::stdout().lock();
        out.write_all(content.as_bytes())
            .map_err(|e| CliError::Io(format!("stdout: {e}")))?;
        return Ok(());
    };
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d,
        _ => Path::new("."),
    };
    let io = |e: std::io::Error| CliError::Io(format!("{}: {e}", path.display()));
    let mut tmp = NamedTempFile::new_in(dir).map_err(io)?;
    tmp.write_all(content.as_bytes()).map_err(io)?;
    tmp.as_file().sync_all().map_err(io)?;
    tmp.persist(path).map_err(|e| io(e.error))?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn numbers_round_trip() {
        for &x in &[0.1, 1.0 / 3.0, 8.0 / 9.0, 2.149_125_799_907_062_5, 1e-300, 0.0] {
            assert_eq!(num(x).parse::<f64>().unwrap(), x);
        }
        assert_eq!(num(0.5), "5.0000000000000000e-1");
    }

    #[test]
    fn atomic_write_replaces_file() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("out.csv");
        emit(Some(&path), "a\n").unwrap();
        emit(Some(&path), "b\n").unwrap();
        assert_eq!(std::fs::read_to_string(&path).unwrap(), "b\n");
        assert_eq!(std::fs::read_dir(dir.path()).unwrap().count(), 1);
    }
}
