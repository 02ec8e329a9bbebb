//! Minimal standalone SVG line charts from time-series CSV.

use std::fmt::Write as _;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum PlotError {
    #[error("CSV is empty")]
    Empty,
    #[error("CSV has no data rows")]
    NoRows,
    #[error("CSV needs a time column and at least one series")]
    NoSeries,
    #[error("column `{0}` not found")]
    MissingColumn(String),
    #[error("row {row}: `{value}` is not a number")]
    NotNumeric { row: usize, value: String },
    #[error(transparent)]
    Csv(#[from] csv::Error),
}

const WIDTH: f64 = 760.0;
const HEIGHT: f64 = 420.0;
const LEFT: f64 = 70.0;
const RIGHT: f64 = 200.0;
const TOP: f64 = 20.0;
const BOTTOM: f64 = 40.0;
const PALETTE: [&str; 8] = [
    "#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b", "#e377c2", "#17becf",
];

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;").replace('"', "&quot;")
}

fn span(lo: f64, hi: f64) -> (f64, f64) {
    if hi > lo {
        (lo, hi)
    } else {
        // flat data still gets a visible band
        (lo - 1.0, hi + 1.0)
    }
}

/// Renders the first column as x against every other column (or only the
/// named `columns`), one polyline each.
pub fn emit_plot(csv_text: &str, columns: Option<&[String]>) -> Result<String, PlotError> {
    if csv_text.trim().is_empty() {
        return Err(PlotError::Empty);
    }
    let mut rdr = csv::ReaderBuilder::new().from_reader(csv_text.as_bytes());
    let headers: Vec<String> = rdr.headers()?.iter().map(str::to_string).collect();
    let picked: Vec<usize> = match columns {
        Some(cols) => cols
            .iter()
            .map(|c| {
                headers[1..]
                    .iter()
                    .position(|h| h == c)
                    .map(|i| i + 1)
                    .ok_or_else(|| PlotError::MissingColumn(c.clone()))
            })
            .collect::<Result<_, _>>()?,
        None => (1..headers.len()).collect(),
    };
    if picked.is_empty() {
        return Err(PlotError::NoSeries);
    }
    let mut xs = Vec::new();
    let mut series = vec![Vec::new(); picked.len()];
    for (row, rec) in rdr.records().enumerate() {
        let rec = rec?;
        let num = |i: usize| {
            let v = rec.get(i).unwrap_or("");
            v.trim().parse::<f64>().map_err(|_| PlotError::NotNumeric {
                row: row + 1,
                value: v.to_string(),
            })
        };
        xs.push(num(0)?);
        for (s, &c) in series.iter_mut().zip(&picked) {
            s.push(num(c)?);
        }
    }
    if xs.is_empty() {
        return Err(PlotError::NoRows);
    }

    let fold = |v: &mut dyn Iterator<Item = f64>| v.fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), x| (a.min(x), b.max(x)));
    let (x0, x1) = {
        let (a, b) = fold(&mut xs.iter().copied());
        span(a, b)
    };
    let (y0, y1) = {
        let (a, b) = fold(&mut series.iter().flatten().copied());
        span(a, b)
    };
    let pw = WIDTH - LEFT - RIGHT;
    let ph = HEIGHT - TOP - BOTTOM;
    let px = |x: f64| LEFT + (x - x0) / (x1 - x0) * pw;
    let py = |y: f64| TOP + ph - (y - y0) / (y1 - y0) * ph;

    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="11">"#
    );
    let _ = writeln!(s, r#"<rect width="{WIDTH}" height="{HEIGHT}" fill="white"/>"#);
    let _ = writeln!(
        s,
        r#"<path d="M{LEFT},{TOP} V{:.2} H{:.2}" fill="none" stroke="black"/>"#,
        TOP + ph,
        LEFT + pw
    );
    let _ = writeln!(s, r#"<text x="{:.2}" y="{:.2}" text-anchor="end">{}</text>"#, LEFT - 4.0, TOP + ph, fmt_tick(y0));
    let _ = writeln!(s, r#"<text x="{:.2}" y="{:.2}" text-anchor="end">{}</text>"#, LEFT - 4.0, TOP + 10.0, fmt_tick(y1));
    let _ = writeln!(s, r#"<text x="{LEFT}" y="{:.2}" text-anchor="middle">{}</text>"#, TOP + ph + 15.0, fmt_tick(x0));
    let _ = writeln!(s, r#"<text x="{:.2}" y="{:.2}" text-anchor="middle">{}</text>"#, LEFT + pw, TOP + ph + 15.0, fmt_tick(x1));
    let _ = writeln!(
        s,
        r#"<text x="{:.2}" y="{:.2}" text-anchor="middle">{}</text>"#,
        LEFT + pw / 2.0,
        HEIGHT - 8.0,
        escape(&headers[0])
    );
    for (k, (ys, &c)) in series.iter().zip(&picked).enumerate() {
        let color = PALETTE[k % PALETTE.len()];
        let points: Vec<String> = xs.iter().zip(ys).map(|(&x, &y)| format!("{:.2},{:.2}", px(x), py(y))).collect();
        let _ = writeln!(
            s,
            r#"<polyline fill="none" stroke="{color}" stroke-width="1.5" points="{}"/>"#,
            points.join(" ")
        );
        let ly = TOP + 10.0 + 16.0 * k as f64;
        let lx = LEFT + pw + 12.0;
        let _ = writeln!(
            s,
            r#"<line x1="{lx:.2}" y1="{:.2}" x2="{:.2}" y2="{:.2}" stroke="{color}" stroke-width="2"/><text x="{:.2}" y="{ly:.2}">{}</text>"#,
            ly - 4.0,
            lx + 18.0,
            ly - 4.0,
            lx + 22.0,
            escape(&headers[c])
        );
    }
    s.push_str("</svg>\n");
    Ok(s)
}

fn fmt_tick(v: f64) -> String {
    if v != 0.0 && (v.abs() >= 1e5 || v.abs() < 1e-2) {
        format!("{v:.2e}")
    } else {
        format!("{v:.2}")
    }
}
