//! Self-contained SVG plots: log-log MSD charts, quiver fields, heatmaps.
//!
//! Coordinates are written with fixed precision so reruns are
//! byte-identical.

use crate::field::{ScalarField, VectorField};
use crate::msd::{HurstFit, MsdSeries};
use std::fmt::Write;

const VIRIDIS: [(f64, f64, f64); 5] = [
    (0.267, 0.005, 0.329),
    (0.229, 0.322, 0.545),
    (0.127, 0.566, 0.551),
    (0.369, 0.789, 0.383),
    (0.993, 0.906, 0.144),
];

fn colormap(t: f64) -> String {
    let t = t.clamp(0.0, 1.0) * (VIRIDIS.len() - 1) as f64;
    let i = (t.floor() as usize).min(VIRIDIS.len() - 2);
    let f = t - i as f64;
    let lerp = |a: f64, b: f64| a + (b - a) * f;
    let (r0, g0, b0) = VIRIDIS[i];
    let (r1, g1, b1) = VIRIDIS[i + 1];
    format!(
        "#{:02x}{:02x}{:02x}",
        (lerp(r0, r1) * 255.0) as u8,
        (lerp(g0, g1) * 255.0) as u8,
        (lerp(b0, b1) * 255.0) as u8
    )
}

struct Canvas {
    body: String,
    width: f64,
    height: f64,
}

impl Canvas {
    fn new(width: f64, height: f64) -> Self {
        Canvas {
            body: String::new(),
            width,
            height,
        }
    }

    fn finish(self) -> String {
        format!(
            "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{:.0}\" height=\"{:.0}\" \
             viewBox=\"0 0 {:.0} {:.0}\">\n<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n{}</svg>\n",
            self.width, self.height, self.width, self.height, self.body
        )
    }

    fn line(&mut self, x1: f64, y1: f64, x2: f64, y2: f64, stroke: &str, width: f64) {
        writeln!(
            self.body,
            "<line x1=\"{x1:.2}\" y1=\"{y1:.2}\" x2=\"{x2:.2}\" y2=\"{y2:.2}\" stroke=\"{stroke}\" stroke-width=\"{width:.2}\"/>"
        )
        .unwrap();
    }

    fn circle(&mut self, x: f64, y: f64, r: f64, fill: &str) {
        writeln!(
            self.body,
            "<circle cx=\"{x:.2}\" cy=\"{y:.2}\" r=\"{r:.2}\" fill=\"{fill}\"/>"
        )
        .unwrap();
    }

    fn rect(&mut self, x: f64, y: f64, w: f64, h: f64, fill: &str) {
        writeln!(
            self.body,
            "<rect x=\"{x:.2}\" y=\"{y:.2}\" width=\"{w:.2}\" height=\"{h:.2}\" fill=\"{fill}\"/>"
        )
        .unwrap();
    }

    fn text(&mut self, x: f64, y: f64, size: f64, anchor: &str, content: &str) {
        writeln!(
            self.body,
            "<text x=\"{x:.2}\" y=\"{y:.2}\" font-size=\"{size:.1}\" font-family=\"sans-serif\" text-anchor=\"{anchor}\">{content}</text>"
        )
        .unwrap();
    }

    fn polygon(&mut self, pts: &[(f64, f64)], fill: &str) {
        let coords: Vec<String> = pts.iter().map(|p| format!("{:.2},{:.2}", p.0, p.1)).collect();
        writeln!(
            self.body,
            "<polygon points=\"{}\" fill=\"{fill}\"/>",
            coords.join(" ")
        )
        .unwrap();
    }
}

/// Log-log plot of an MSD series with its fitted power law.
pub fn msd_loglog(series: &MsdSeries, fit: Option<&HurstFit>) -> String {
    let (w, h) = (640.0, 480.0);
    let margin = 70.0;
    let mut canvas = Canvas::new(w, h);

    let pts: Vec<(f64, f64)> = series
        .abscissae
        .iter()
        .zip(series.values.iter())
        .filter(|&(&t, &v)| t > 0.0 && v > 0.0)
        .map(|(&t, &v)| (t.log10(), v.log10()))
        .collect();
    if pts.is_empty() {
        canvas.text(w / 2.0, h / 2.0, 14.0, "middle", "no positive MSD values");
        return canvas.finish();
    }
    let pad = 0.25;
    let x_min = pts.iter().map(|p| p.0).fold(f64::INFINITY, f64::min) - pad;
    let x_max = pts.iter().map(|p| p.0).fold(f64::NEG_INFINITY, f64::max) + pad;
    let y_min = pts.iter().map(|p| p.1).fold(f64::INFINITY, f64::min) - pad;
    let y_max = pts.iter().map(|p| p.1).fold(f64::NEG_INFINITY, f64::max) + pad;
    let sx = |x: f64| margin + (x - x_min) / (x_max - x_min) * (w - 2.0 * margin);
    let sy = |y: f64| h - margin - (y - y_min) / (y_max - y_min) * (h - 2.0 * margin);

    // frame and decade ticks
    canvas.line(margin, h - margin, w - margin, h - margin, "black", 1.0);
    canvas.line(margin, margin, margin, h - margin, "black", 1.0);
    for d in (x_min.ceil() as i64)..=(x_max.floor() as i64) {
        let x = sx(d as f64);
        canvas.line(x, h - margin, x, h - margin + 6.0, "black", 1.0);
        canvas.text(x, h - margin + 20.0, 11.0, "middle", &format!("1e{d}"));
    }
    for d in (y_min.ceil() as i64)..=(y_max.floor() as i64) {
        let y = sy(d as f64);
        canvas.line(margin - 6.0, y, margin, y, "black", 1.0);
        canvas.text(margin - 10.0, y + 4.0, 11.0, "end", &format!("1e{d}"));
    }
    canvas.text(w / 2.0, h - 20.0, 13.0, "middle", "lag time [min]");
    canvas.text(18.0, h / 2.0, 13.0, "middle", "MSD [um^2]");

    if let Some(fit) = fit {
        // ln rho = alpha ln t + c  ->  log10 rho = alpha log10 t + c / ln 10
        let c10 = fit.intercept / std::f64::consts::LN_10;
        let y0 = fit.alpha * x_min + c10;
        let y1 = fit.alpha * x_max + c10;
        canvas.line(sx(x_min), sy(y0), sx(x_max), sy(y1), "#d62728", 1.5);
        canvas.text(
            w - margin,
            margin - 10.0,
            12.0,
            "end",
            &format!("alpha = {:.4}, H = {:.4}", fit.alpha, fit.hurst),
        );
    }
    for (x, y) in &pts {
        canvas.circle(sx(*x), sy(*y), 3.0, "#1f77b4");
    }
    canvas.finish()
}

/// Quiver plot of a reconstructed field with speed-colored arrows.
pub fn quiver(field: &VectorField, max_arrows_per_axis: usize) -> String {
    let (vw, vh) = (field.width + 1, field.height + 1);
    let stride = (vw.max(vh) / max_arrows_per_axis.max(1)).max(1);
    let cell_px = 640.0 / vw as f64;
    let (w, h) = (vw as f64 * cell_px + 100.0, vh as f64 * cell_px + 40.0);
    let mut canvas = Canvas::new(w, h);

    let speeds: Vec<f64> = field
        .vectors
        .iter()
        .flatten()
        .map(|v| v.norm())
        .collect();
    let max_speed = speeds.iter().cloned().fold(0.0f64, f64::max).max(1e-12);

    let px = |i: usize| 20.0 + i as f64 * cell_px;
    let py = |j: usize| h - 20.0 - j as f64 * cell_px;

    // light outline of the domain
    for j in 0..vh {
        for i in 0..vw {
            if field.vertex(i, j).is_some() {
                canvas.rect(px(i) - cell_px / 2.0, py(j) - cell_px / 2.0, cell_px, cell_px, "#f4f4f4");
            }
        }
    }

    let arrow_len = cell_px * stride as f64 * 0.9;
    for j in (0..vh).step_by(stride) {
        for i in (0..vw).step_by(stride) {
            let Some(v) = field.vertex(i, j) else { continue };
            let speed = v.norm();
            if speed <= 0.0 {
                canvas.circle(px(i), py(j), 1.0, "#bbbbbb");
                continue;
            }
            let color = colormap(speed / max_speed);
            let dir = v / speed;
            let scale = arrow_len * (0.25 + 0.75 * speed / max_speed);
            let (x0, y0) = (px(i), py(j));
            let (x1, y1) = (x0 + dir.x * scale, y0 - dir.y * scale);
            canvas.line(x0, y0, x1, y1, &color, 1.4);
            // arrow head
            let back = 0.3 * scale;
            let side = 0.15 * scale;
            let (bx, by) = (x1 - dir.x * back, y1 + dir.y * back);
            let (pxp, pyp) = (-dir.y, -dir.x);
            canvas.polygon(
                &[
                    (x1, y1),
                    (bx + pxp * side, by + pyp * side),
                    (bx - pxp * side, by - pyp * side),
                ],
                &color,
            );
        }
    }

    // color bar
    let bar_x = w - 60.0;
    for k in 0..100 {
        let t = k as f64 / 99.0;
        let y = h - 40.0 - t * (h - 80.0);
        canvas.rect(bar_x, y - (h - 80.0) / 99.0, 16.0, (h - 80.0) / 99.0 + 0.5, &colormap(t));
    }
    canvas.text(bar_x + 20.0, h - 36.0, 11.0, "start", "0");
    canvas.text(
        bar_x + 20.0,
        44.0,
        11.0,
        "start",
        &format!("{max_speed:.3} um/min"),
    );
    canvas.finish()
}

/// Per-cell heatmap of one scalar solution (cells colored by the mean of
/// their corner vertices).
pub fn heatmap(field: &ScalarField, title: &str) -> String {
    let (cw, ch) = (field.grid_width(), field.grid_height());
    let cell_px = (640.0 / cw as f64).min(640.0 / ch as f64);
    let (w, h) = (cw as f64 * cell_px + 100.0, ch as f64 * cell_px + 60.0);
    let mut canvas = Canvas::new(w, h);

    let mut vmin = f64::INFINITY;
    let mut vmax = f64::NEG_INFINITY;
    let mut cell_vals = vec![None; cw * ch];
    for cy in 0..ch {
        for cx in 0..cw {
            let corners = [
                (cx, cy),
                (cx + 1, cy),
                (cx, cy + 1),
                (cx + 1, cy + 1),
            ];
            if corners
                .iter()
                .all(|&(i, j)| field.in_domain(field.vertex_index(i, j)))
            {
                let mean = corners.iter().map(|&(i, j)| field.vertex(i, j)).sum::<f64>() / 4.0;
                vmin = vmin.min(mean);
                vmax = vmax.max(mean);
                cell_vals[cy * cw + cx] = Some(mean);
            }
        }
    }
    let span = (vmax - vmin).max(1e-12);
    for cy in 0..ch {
        for cx in 0..cw {
            if let Some(v) = cell_vals[cy * cw + cx] {
                let x = 20.0 + cx as f64 * cell_px;
                let y = h - 40.0 - (cy + 1) as f64 * cell_px;
                canvas.rect(x, y, cell_px + 0.3, cell_px + 0.3, &colormap((v - vmin) / span));
            }
        }
    }
    canvas.text(w / 2.0, 24.0, 13.0, "middle", title);
    let bar_x = w - 60.0;
    for k in 0..100 {
        let t = k as f64 / 99.0;
        let y = h - 40.0 - t * (h - 100.0);
        canvas.rect(bar_x, y - (h - 100.0) / 99.0, 16.0, (h - 100.0) / 99.0 + 0.5, &colormap(t));
    }
    canvas.text(bar_x + 20.0, h - 36.0, 11.0, "start", &format!("{vmin:.3}"));
    canvas.text(bar_x + 20.0, 64.0, 11.0, "start", &format!("{vmax:.3}"));
    canvas.finish()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn colormap_endpoints() {
        assert_eq!(colormap(0.0), "#440153");
        assert_eq!(colormap(1.0), "#fde724");
        assert_eq!(colormap(-3.0), colormap(0.0));
        assert_eq!(colormap(7.0), colormap(1.0));
    }

    #[test]
    fn msd_plot_contains_points_and_fit() {
        let series = MsdSeries {
            abscissae: vec![2.5, 5.0, 7.5, 10.0],
            values: vec![1.0, 2.1, 2.9, 4.2],
            counts: vec![10, 10, 10, 10],
            fit: None,
        };
        let fit = HurstFit {
            alpha: 1.02,
            hurst: 0.51,
            intercept: -0.9,
        };
        let svg = msd_loglog(&series, Some(&fit));
        assert!(svg.starts_with("<svg"));
        assert!(svg.contains("circle"));
        assert!(svg.contains("alpha = 1.0200"));
        assert!(svg.trim_end().ends_with("</svg>"));
    }
}
