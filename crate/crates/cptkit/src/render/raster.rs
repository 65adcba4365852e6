//! Optional PNG rasterization by invoking an external SVG rasterizer.
//!
//! The command comes from `CPTKIT_RASTERIZER` (default `resvg`) and is
//! called as `<cmd> <in.svg> <out.png>`. Not required by any pipeline
//! stage; judge payloads accept SVG bytes directly.

use std::io;
use std::path::Path;
use std::process::Command;

pub fn rasterize_svg(svg: &str, out_png: &Path) -> io::Result<()> {
    let dir = std::env::temp_dir();
    let svg_path = dir.join(format!("cptkit-raster-{}.svg", std::process::id()));
    std::fs::write(&svg_path, svg)?;
    let cmd = std::env::var("CPTKIT_RASTERIZER").unwrap_or_else(|_| "resvg".to_string());
    let status = Command::new(cmd).arg(&svg_path).arg(out_png).status()?;
    std::fs::remove_file(&svg_path).ok();
    if !status.success() {
        return Err(io::Error::other(format!("rasterizer exited with {status}")));
    }
    Ok(())
}
