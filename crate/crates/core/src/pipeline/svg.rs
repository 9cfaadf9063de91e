//! Minimal static SVG plots: a scatter and a multi-series line chart.
//! Data files are the primary report output; these are quick-look renders.

use std::io::Write;
use std::path::Path;

const WIDTH: f64 = 640.0;
const HEIGHT: f64 = 480.0;
const MARGIN: f64 = 56.0;

/// Tier palette: blue, orange, green, red, then grey.
const COLORS: [&str; 5] = ["#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#7f7f7f"];

struct Frame {
    min_x: f64,
    max_x: f64,
    min_y: f64,
    max_y: f64,
}

impl Frame {
    fn from_points(points: impl Iterator<Item = (f64, f64)>) -> Frame {
        let mut frame = Frame {
            min_x: f64::INFINITY,
            max_x: f64::NEG_INFINITY,
            min_y: f64::INFINITY,
            max_y: f64::NEG_INFINITY,
        };
        for (x, y) in points {
            frame.min_x = frame.min_x.min(x);
            frame.max_x = frame.max_x.max(x);
            frame.min_y = frame.min_y.min(y);
            frame.max_y = frame.max_y.max(y);
        }
        if frame.min_x >= frame.max_x {
            frame.max_x = frame.min_x + 1.0;
        }
        if frame.min_y >= frame.max_y {
            frame.max_y = frame.min_y + 1.0;
        }
        frame
    }

    fn x(&self, v: f64) -> f64 {
        MARGIN + (v - self.min_x) / (self.max_x - self.min_x) * (WIDTH - 2.0 * MARGIN)
    }

    fn y(&self, v: f64) -> f64 {
        HEIGHT - MARGIN - (v - self.min_y) / (self.max_y - self.min_y) * (HEIGHT - 2.0 * MARGIN)
    }
}

fn header(title: &str, xlabel: &str, ylabel: &str, frame: &Frame) -> String {
    let mut s = format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{WIDTH}\" height=\"{HEIGHT}\" \
         viewBox=\"0 0 {WIDTH} {HEIGHT}\">\n\
         <rect width=\"{WIDTH}\" height=\"{HEIGHT}\" fill=\"white\"/>\n\
         <text x=\"{}\" y=\"24\" text-anchor=\"middle\" font-size=\"15\">{}</text>\n",
        WIDTH / 2.0,
        escape(title)
    );
    s.push_str(&format!(
        "<line x1=\"{m}\" y1=\"{b}\" x2=\"{r}\" y2=\"{b}\" stroke=\"black\"/>\n\
         <line x1=\"{m}\" y1=\"{t}\" x2=\"{m}\" y2=\"{b}\" stroke=\"black\"/>\n",
        m = MARGIN,
        b = HEIGHT - MARGIN,
        r = WIDTH - MARGIN,
        t = MARGIN
    ));
    s.push_str(&format!(
        "<text x=\"{}\" y=\"{}\" text-anchor=\"middle\" font-size=\"12\">{}</text>\n",
        WIDTH / 2.0,
        HEIGHT - 14.0,
        escape(xlabel)
    ));
    s.push_str(&format!(
        "<text x=\"16\" y=\"{}\" text-anchor=\"middle\" font-size=\"12\" \
         transform=\"rotate(-90 16 {})\">{}</text>\n",
        HEIGHT / 2.0,
        HEIGHT / 2.0,
        escape(ylabel)
    ));
    for (value, label_x) in [(frame.min_x, true), (frame.max_x, true)] {
        let _ = label_x;
        s.push_str(&format!(
            "<text x=\"{}\" y=\"{}\" text-anchor=\"middle\" font-size=\"10\">{value:.2}</text>\n",
            frame.x(value),
            HEIGHT - MARGIN + 16.0
        ));
    }
    for value in [frame.min_y, frame.max_y] {
        s.push_str(&format!(
            "<text x=\"{}\" y=\"{}\" text-anchor=\"end\" font-size=\"10\">{value:.2}</text>\n",
            MARGIN - 6.0,
            frame.y(value) + 4.0
        ));
    }
    s
}

fn escape(text: &str) -> String {
    text.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

/// Scatter plot; the third tuple element picks the color class (1-based).
pub fn scatter(
    path: &Path,
    title: &str,
    xlabel: &str,
    ylabel: &str,
    points: &[(f64, f64, u8)],
) -> std::io::Result<()> {
    let frame = Frame::from_points(points.iter().map(|p| (p.0, p.1)));
    let mut s = header(title, xlabel, ylabel, &frame);
    for &(x, y, class) in points {
        let color = COLORS[((class.max(1) - 1) as usize).min(COLORS.len() - 1)];
        s.push_str(&format!(
            "<circle cx=\"{:.1}\" cy=\"{:.1}\" r=\"3\" fill=\"{color}\" fill-opacity=\"0.7\"/>\n",
            frame.x(x),
            frame.y(y)
        ));
    }
    s.push_str("</svg>\n");
    let mut file = std::fs::File::create(path)?;
    file.write_all(s.as_bytes())
}

/// Multi-series line chart with a small legend.
pub fn lines(
    path: &Path,
    title: &str,
    xlabel: &str,
    ylabel: &str,
    series: &[(String, Vec<(f64, f64)>)],
) -> std::io::Result<()> {
    let frame = Frame::from_points(series.iter().flat_map(|s| s.1.iter().copied()));
    let mut s = header(title, xlabel, ylabel, &frame);
    for (i, (name, curve)) in series.iter().enumerate() {
        let color = COLORS[i % COLORS.len()];
        let points: Vec<String> = curve
            .iter()
            .map(|&(x, y)| format!("{:.1},{:.1}", frame.x(x), frame.y(y)))
            .collect();
        s.push_str(&format!(
            "<polyline points=\"{}\" fill=\"none\" stroke=\"{color}\" stroke-width=\"1.5\"/>\n",
            points.join(" ")
        ));
        s.push_str(&format!(
            "<text x=\"{}\" y=\"{}\" font-size=\"11\" fill=\"{color}\">{}</text>\n",
            WIDTH - MARGIN - 120.0,
            MARGIN + 16.0 * i as f64,
            escape(name)
        ));
    }
    s.push_str("</svg>\n");
    let mut file = std::fs::File::create(path)?;
    file.write_all(s.as_bytes())
}
