use std::path::{Path, PathBuf};

/// Environment variable naming the default image directory.
pub const CORPUS_ENV: &str = "DCTLAB_CORPUS";

/// The fixture images shipped with this crate.
pub fn bundled_fixtures() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures")
}

/// `explicit`, else `$DCTLAB_CORPUS`, else the bundled fixtures.
pub fn corpus_dir(explicit: Option<&Path>) -> PathBuf {
    if let Some(p) = explicit {
        return p.to_path_buf();
    }
    match std::env::var_os(CORPUS_ENV) {
        Some(v) if !v.is_empty() => PathBuf::from(v),
        _ => bundled_fixtures(),
    }
}

/// `.pgm` files under `path` sorted by name, or `path` itself if it is a file.
pub fn list_images(path: &Path) -> std::io::Result<Vec<PathBuf>> {
    if path.is_file() {
        return Ok(vec![path.to_path_buf()]);
    }
    let mut v: Vec<PathBuf> =
        std::fs::read_dir(path)?.filter_map(|e| e.ok().map(|e| e.path())).filter(|p| p.extension().is_some_and(|e| e.eq_ignore_ascii_case("pgm"))).collect();
    v.sort();
    Ok(v)
}

/// File stem used as the `image` column.
pub fn image_label(path: &Path) -> String {
    path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_else(|| path.display().to_string())
}
