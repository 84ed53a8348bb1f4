//! Static SVG 1.1 figure emission: scatter drops, dissemination curves, and
//! latency histograms with a fitted beta PDF overlay. No plotting deps; the
//! documents are plain axes, polylines, rectangles, and text.

use cvbft_core::gossip::GossipTrace;
use cvbft_core::spatial::{NetworkSnapshot, Role};
use cvbft_core::stats::{beta_ln_pdf, BetaFit, Histogram};

const WIDTH: f64 = 640.0;
const HEIGHT: f64 = 480.0;
const MARGIN_L: f64 = 70.0;
const MARGIN_R: f64 = 20.0;
const MARGIN_T: f64 = 40.0;
const MARGIN_B: f64 = 55.0;

const PALETTE: [&str; 6] = ["#2a7f2a", "#1f4e9e", "#c23b22", "#7a3b9e", "#b8860b", "#008080"];

struct Frame {
    x_min: f64,
    x_max: f64,
    y_min: f64,
    y_max: f64,
}

impl Frame {
    fn x(&self, v: f64) -> f64 {
        MARGIN_L + (v - self.x_min) / (self.x_max - self.x_min) * (WIDTH - MARGIN_L - MARGIN_R)
    }

    fn y(&self, v: f64) -> f64 {
        HEIGHT - MARGIN_B
            - (v - self.y_min) / (self.y_max - self.y_min) * (HEIGHT - MARGIN_T - MARGIN_B)
    }
}

fn open_svg(title: &str) -> String {
    format!(
        "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n\
         <svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" \
         width=\"{WIDTH}\" height=\"{HEIGHT}\" viewBox=\"0 0 {WIDTH} {HEIGHT}\">\n\
         <rect width=\"{WIDTH}\" height=\"{HEIGHT}\" fill=\"white\"/>\n\
         <text x=\"{:.1}\" y=\"24\" font-family=\"sans-serif\" font-size=\"15\" \
         text-anchor=\"middle\">{title}</text>\n",
        WIDTH / 2.0
    )
}

fn axes(frame: &Frame, x_label: &str, y_label: &str) -> String {
    let mut s = String::new();
    let x0 = frame.x(frame.x_min);
    let x1 = frame.x(frame.x_max);
    let y0 = frame.y(frame.y_min);
    let y1 = frame.y(frame.y_max);
    s.push_str(&format!(
        "<line x1=\"{x0:.1}\" y1=\"{y0:.1}\" x2=\"{x1:.1}\" y2=\"{y0:.1}\" stroke=\"black\"/>\n\
         <line x1=\"{x0:.1}\" y1=\"{y0:.1}\" x2=\"{x0:.1}\" y2=\"{y1:.1}\" stroke=\"black\"/>\n"
    ));
    for i in 0..=5 {
        let fx = frame.x_min + (frame.x_max - frame.x_min) * i as f64 / 5.0;
        let fy = frame.y_min + (frame.y_max - frame.y_min) * i as f64 / 5.0;
        let px = frame.x(fx);
        let py = frame.y(fy);
        s.push_str(&format!(
            "<line x1=\"{px:.1}\" y1=\"{y0:.1}\" x2=\"{px:.1}\" y2=\"{:.1}\" stroke=\"black\"/>\n\
             <text x=\"{px:.1}\" y=\"{:.1}\" font-family=\"sans-serif\" font-size=\"11\" \
             text-anchor=\"middle\">{}</text>\n",
            y0 + 5.0,
            y0 + 18.0,
            trim_num(fx)
        ));
        s.push_str(&format!(
            "<line x1=\"{x0:.1}\" y1=\"{py:.1}\" x2=\"{:.1}\" y2=\"{py:.1}\" stroke=\"black\"/>\n\
             <text x=\"{:.1}\" y=\"{:.1}\" font-family=\"sans-serif\" font-size=\"11\" \
             text-anchor=\"end\">{}</text>\n",
            x0 - 5.0,
            x0 - 8.0,
            py + 4.0,
            trim_num(fy)
        ));
    }
    s.push_str(&format!(
        "<text x=\"{:.1}\" y=\"{:.1}\" font-family=\"sans-serif\" font-size=\"13\" \
         text-anchor=\"middle\">{x_label}</text>\n",
        (x0 + x1) / 2.0,
        HEIGHT - 12.0
    ));
    s.push_str(&format!(
        "<text x=\"16\" y=\"{:.1}\" font-family=\"sans-serif\" font-size=\"13\" \
         text-anchor=\"middle\" transform=\"rotate(-90 16 {:.1})\">{y_label}</text>\n",
        (y0 + y1) / 2.0,
        (y0 + y1) / 2.0
    ));
    s
}

fn trim_num(v: f64) -> String {
    if (v - v.round()).abs() < 1e-9 && v.abs() < 1e9 {
        format!("{}", v.round() as i64)
    } else {
        format!("{v:.3}")
    }
}

/// Node-drop scatter: black squares for legitimate nodes, green circles for
/// faulty ones.
pub fn scatter_svg(snapshot: &NetworkSnapshot, title: &str) -> String {
    let side = snapshot.region.side_m();
    let frame = Frame {
        x_min: 0.0,
        x_max: side,
        y_min: 0.0,
        y_max: side,
    };
    let mut s = open_svg(title);
    s.push_str(&axes(&frame, "x (m)", "y (m)"));
    for node in &snapshot.nodes {
        let px = frame.x(node.x_m);
        let py = frame.y(node.y_m);
        match node.role {
            Role::Legitimate => s.push_str(&format!(
                "<rect x=\"{:.1}\" y=\"{:.1}\" width=\"6\" height=\"6\" fill=\"black\"/>\n",
                px - 3.0,
                py - 3.0
            )),
            Role::Faulty => s.push_str(&format!(
                "<circle cx=\"{px:.1}\" cy=\"{py:.1}\" r=\"3.5\" fill=\"none\" \
                 stroke=\"#2a7f2a\" stroke-width=\"1.5\"/>\n"
            )),
        }
    }
    s.push_str("</svg>\n");
    s
}

/// Dissemination curves: informed fraction r_t per slot, one polyline per N.
pub fn curves_svg(traces: &[(String, &GossipTrace)], title: &str) -> String {
    let max_t = traces
        .iter()
        .map(|(_, t)| t.informed.len().saturating_sub(1))
        .max()
        .unwrap_or(1)
        .max(1);
    let frame = Frame {
        x_min: 0.0,
        x_max: max_t as f64,
        y_min: 0.0,
        y_max: 1.0,
    };
    let mut s = open_svg(title);
    s.push_str(&axes(&frame, "time slot t", "informed fraction r_t"));
    for (i, (label, trace)) in traces.iter().enumerate() {
        let color = PALETTE[i % PALETTE.len()];
        let points: Vec<String> = trace
            .informed
            .iter()
            .enumerate()
            .map(|(t, r)| format!("{:.1},{:.1}", frame.x(t as f64), frame.y(*r)))
            .collect();
        s.push_str(&format!(
            "<polyline points=\"{}\" fill=\"none\" stroke=\"{color}\" stroke-width=\"2\"/>\n",
            points.join(" ")
        ));
        let ly = MARGIN_T + 16.0 * i as f64 + 10.0;
        s.push_str(&format!(
            "<line x1=\"{:.1}\" y1=\"{ly:.1}\" x2=\"{:.1}\" y2=\"{ly:.1}\" stroke=\"{color}\" \
             stroke-width=\"2\"/>\n\
             <text x=\"{:.1}\" y=\"{:.1}\" font-family=\"sans-serif\" font-size=\"12\">{label}</text>\n",
            MARGIN_L + 10.0,
            MARGIN_L + 34.0,
            MARGIN_L + 40.0,
            ly + 4.0
        ));
    }
    s.push_str("</svg>\n");
    s
}

/// Latency histogram (density-normalized bars) with the fitted beta PDF,
/// mapped back from the scaled support to latency units, drawn on top.
pub fn latency_hist_svg(hist: &Histogram, fit: Option<&BetaFit>, title: &str) -> String {
    let n: u64 = hist.counts.iter().sum();
    let x_min = hist.bin_edges[0];
    let x_max = *hist.bin_edges.last().unwrap();
    let mut densities = Vec::with_capacity(hist.counts.len());
    for (i, &c) in hist.counts.iter().enumerate() {
        let w = hist.bin_edges[i + 1] - hist.bin_edges[i];
        densities.push(c as f64 / (n as f64 * w));
    }
    let mut y_max = densities.iter().cloned().fold(0.0f64, f64::max);
    let pdf_points: Vec<(f64, f64)> = match fit {
        Some(f) => (0..=400)
            .filter_map(|i| {
                let x = x_min + (x_max - x_min) * i as f64 / 400.0;
                let scaled = (x - f.lower) / (f.upper - f.lower);
                if scaled <= 0.0 || scaled >= 1.0 {
                    return None;
                }
                let density = beta_ln_pdf(scaled, f.alpha, f.beta).exp() / (f.upper - f.lower);
                density.is_finite().then_some((x, density))
            })
            .collect(),
        None => Vec::new(),
    };
    for (_, d) in &pdf_points {
        y_max = y_max.max(*d);
    }
    if y_max <= 0.0 {
        y_max = 1.0;
    }
    let frame = Frame {
        x_min,
        x_max,
        y_min: 0.0,
        y_max: y_max * 1.05,
    };
    let mut s = open_svg(title);
    s.push_str(&axes(&frame, "latency (slots)", "density"));
    for (i, &d) in densities.iter().enumerate() {
        let x0 = frame.x(hist.bin_edges[i]);
        let x1 = frame.x(hist.bin_edges[i + 1]);
        let y = frame.y(d);
        let base = frame.y(0.0);
        s.push_str(&format!(
            "<rect x=\"{x0:.1}\" y=\"{y:.1}\" width=\"{:.1}\" height=\"{:.1}\" \
             fill=\"#9ecae1\" stroke=\"#3182bd\"/>\n",
            (x1 - x0).max(0.5),
            (base - y).max(0.0)
        ));
    }
    if !pdf_points.is_empty() {
        let points: Vec<String> = pdf_points
            .iter()
            .map(|(x, d)| format!("{:.1},{:.1}", frame.x(*x), frame.y(*d)))
            .collect();
        s.push_str(&format!(
            "<polyline points=\"{}\" fill=\"none\" stroke=\"black\" stroke-width=\"2\"/>\n",
            points.join(" ")
        ));
    }
    s.push_str("</svg>\n");
    s
}
