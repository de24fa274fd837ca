use std::io::Write;
use std::path::Path;

/// Writes a minimal SVG line plot of truth vs. prediction over a sample
/// window. Presentation only; nothing downstream reads it back.
pub fn write_plot(
    path: impl AsRef<Path>,
    truth: &[f64],
    predictions: &[f64],
    max_points: usize,
) -> std::io::Result<()> {
    let n = truth.len().min(predictions.len()).min(max_points.max(2));
    let truth = &truth[..n];
    let predictions = &predictions[..n];
    let (width, height, pad) = (900.0f64, 420.0f64, 45.0f64);

    let lo = truth
        .iter()
        .chain(predictions)
        .copied()
        .fold(f64::INFINITY, f64::min);
    let hi = truth
        .iter()
        .chain(predictions)
        .copied()
        .fold(f64::NEG_INFINITY, f64::max);
    let span = if hi > lo { hi - lo } else { 1.0 };

    let x_at = |i: usize| pad + (width - 2.0 * pad) * i as f64 / (n - 1) as f64;
    let y_at = |v: f64| height - pad - (height - 2.0 * pad) * (v - lo) / span;
    let polyline = |values: &[f64]| -> String {
        values
            .iter()
            .enumerate()
            .map(|(i, &v)| format!("{:.2},{:.2}", x_at(i), y_at(v)))
            .collect::<Vec<_>>()
            .join(" ")
    };

    let mut file = std::fs::File::create(path)?;
    writeln!(
        file,
        r#"<svg xmlns="http://www.w3.org/2000/svg" viewBox="0 0 {width} {height}" font-family="monospace" font-size="12">"#
    )?;
    writeln!(file, r#"<rect width="{width}" height="{height}" fill="white"/>"#)?;
    writeln!(
        file,
        r#"<line x1="{pad}" y1="{}" x2="{}" y2="{}" stroke="black"/>"#,
        height - pad,
        width - pad,
        height - pad
    )?;
    writeln!(
        file,
        r#"<line x1="{pad}" y1="{pad}" x2="{pad}" y2="{}" stroke="black"/>"#,
        height - pad
    )?;
    writeln!(
        file,
        r##"<polyline points="{}" fill="none" stroke="#1f77b4" stroke-width="1.5"/>"##,
        polyline(truth)
    )?;
    writeln!(
        file,
        r##"<polyline points="{}" fill="none" stroke="#d62728" stroke-width="1.5"/>"##,
        polyline(predictions)
    )?;
    writeln!(
        file,
        r##"<text x="{}" y="20" fill="#1f77b4">actual</text><text x="{}" y="20" fill="#d62728">predicted</text>"##,
        pad,
        pad + 80.0
    )?;
    writeln!(
        file,
        r#"<text x="{pad}" y="{}">n={n}  min={lo:.5}  max={hi:.5}</text>"#,
        height - 10.0
    )?;
    writeln!(file, "</svg>")?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn writes_wellformed_svg() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("plot.svg");
        let truth: Vec<f64> = (0..50).map(|i| (i as f64 * 0.3).sin()).collect();
        let pred: Vec<f64> = truth.iter().map(|v| v + 0.05).collect();
        write_plot(&path, &truth, &pred, 200).unwrap();
        let text = std::fs::read_to_string(&path).unwrap();
        assert!(text.starts_with("<svg"));
        assert!(text.trim_end().ends_with("</svg>"));
        assert_eq!(text.matches("<polyline").count(), 2);
    }
}
