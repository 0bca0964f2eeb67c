use std::str::FromStr;

use bestalign::{distance_matrix, solve_optimized};

use super::{load_pair, HeatmapArgs, Io};
use crate::document::write_atomic;
use crate::error::CliError;
use crate::heatmap;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ImageFormat {
    Pgm,
    Svg,
}

impl FromStr for ImageFormat {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s.to_ascii_lowercase().as_str() {
            "pgm" => Ok(ImageFormat::Pgm),
            "svg" => Ok(ImageFormat::Svg),
            other => Err(format!("unknown image format '{other}' (expected pgm or svg)")),
        }
    }
}

pub(super) fn run(args: HeatmapArgs, io: &mut Io<'_>) -> Result<(), CliError> {
    let format = match args.image_format {
        Some(f) => f,
        None => args
            .output
            .extension()
            .and_then(|e| e.to_str())
            .and_then(|e| e.parse().ok())
            .ok_or_else(|| {
                CliError::Usage(format!(
                    "cannot infer image format from '{}'; pass --image-format pgm|svg",
                    args.output.display()
                ))
            })?,
    };
    if args.cell_size == 0 {
        return Err(CliError::Usage("--cell-size must be positive".into()));
    }

    let (audio, text) = load_pair(&args.pair)?;
    let metric = args.pair.metric;
    let distances = distance_matrix(&audio, &text, metric)?;
    let img = heatmap::normalize(&distances);
    if img.flat {
        writeln!(io.err, "warning: all distances are equal; rendering uniform gray {}", heatmap::FLAT_GRAY)?;
    }
    let body = match format {
        ImageFormat::Pgm => heatmap::to_pgm(&img),
        ImageFormat::Svg => {
            let best = solve_optimized(&audio, &text, metric)?;
            heatmap::to_svg(&img, &best.path, args.cell_size)
        }
    };
    write_atomic(&args.output, body.as_bytes())?;
    let (lo, hi) = distances.min_max();
    writeln!(
        io.out,
        "wrote {} ({} columns x {} rows, {metric} distances {lo} to {hi})",
        args.output.display(),
        img.width,
        img.height
    )?;
    Ok(())
}
