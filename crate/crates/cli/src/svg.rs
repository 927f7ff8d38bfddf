//! Minimal self-contained SVG charts.

use std::fmt::Write;

fn esc(s: &str) -> String {
    s.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
        .replace('"', "&quot;")
}

/// A polyline drawn on the SPA plane.
pub struct PlaneLine<'a> {
    pub name: &'a str,
    pub color: &'a str,
    pub points: Vec<(f64, f64)>,
}

const W: f64 = 560.0;
const H: f64 = 560.0;
const PAD: f64 = 60.0;

/// Scatter of labelled points over sentinel lines; x is SPA against
/// fluency, y against adequacy.
pub fn spa_plane_svg(title: &str, points: &[(String, f64, f64)], lines: &[PlaneLine]) -> String {
    let all = points
        .iter()
        .map(|(_, x, y)| (*x, *y))
        .chain(lines.iter().flat_map(|l| l.points.iter().copied()));
    let (mut lo_x, mut lo_y) = (1.0f64, 1.0f64);
    for (x, y) in all {
        lo_x = lo_x.min(x);
        lo_y = lo_y.min(y);
    }
    let lo_x = ((lo_x - 0.02) * 20.0).floor() / 20.0;
    let lo_y = ((lo_y - 0.02) * 20.0).floor() / 20.0;
    let sx = |x: f64| PAD + (x - lo_x) / (1.0 - lo_x).max(1e-9) * (W - 2.0 * PAD);
    let sy = |y: f64| H - PAD - (y - lo_y) / (1.0 - lo_y).max(1e-9) * (H - 2.0 * PAD);

    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{W}" height="{H}" viewBox="0 0 {W} {H}" font-family="sans-serif" font-size="11">"#
    );
    let _ = writeln!(s, r#"<rect width="100%" height="100%" fill="white"/>"#);
    let _ = writeln!(
        s,
        r#"<text x="{}" y="24" text-anchor="middle" font-size="14">{}</text>"#,
        W / 2.0,
        esc(title)
    );
    let _ = writeln!(
        s,
        r#"<rect x="{PAD}" y="{PAD}" width="{}" height="{}" fill="none" stroke="black"/>"#,
        W - 2.0 * PAD,
        H - 2.0 * PAD
    );
    let _ = writeln!(
        s,
        r#"<text x="{}" y="{}" text-anchor="middle">SPA vs Fluency MQM</text>"#,
        W / 2.0,
        H - 18.0
    );
    let _ = writeln!(
        s,
        r#"<text x="18" y="{}" text-anchor="middle" transform="rotate(-90 18 {})">SPA vs Adequacy MQM</text>"#,
        H / 2.0,
        H / 2.0
    );
    for (v, anchor) in [(lo_x, "start"), (1.0, "end")] {
        let _ = writeln!(
            s,
            r#"<text x="{:.1}" y="{}" text-anchor="{anchor}">{v:.2}</text>"#,
            sx(v),
            H - PAD + 14.0
        );
    }
    for v in [lo_y, 1.0] {
        let _ = writeln!(
            s,
            r#"<text x="{}" y="{:.1}" text-anchor="end">{v:.2}</text>"#,
            PAD - 4.0,
            sy(v) + 4.0
        );
    }
    for (li, line) in lines.iter().enumerate() {
        let pts: Vec<String> = line
            .points
            .iter()
            .map(|&(x, y)| format!("{:.1},{:.1}", sx(x), sy(y)))
            .collect();
        let _ = writeln!(
            s,
            r#"<polyline points="{}" fill="none" stroke="{}" stroke-width="1.5" stroke-dasharray="5,3"/>"#,
            pts.join(" "),
            line.color
        );
        let _ = writeln!(
            s,
            r#"<text x="{}" y="{}" fill="{}">{}</text>"#,
            PAD + 8.0,
            PAD + 16.0 + 14.0 * li as f64,
            line.color,
            esc(line.name)
        );
    }
    for (label, x, y) in points {
        let _ = writeln!(
            s,
            r#"<circle cx="{:.1}" cy="{:.1}" r="3.5" fill="black"/>"#,
            sx(*x),
            sy(*y)
        );
        let _ = writeln!(
            s,
            r#"<text x="{:.1}" y="{:.1}">{}</text>"#,
            sx(*x) + 5.0,
            sy(*y) - 5.0,
            esc(label)
        );
    }
    s.push_str("</svg>\n");
    s
}

/// Horizontal stacked bars of (agree adequacy, agree fluency, metric tie)
/// fractions on discordant pairs.
pub fn breakdown_svg(title: &str, rows: &[(String, f64, f64, f64)]) -> String {
    let label_w = 160.0;
    let bar_w = 360.0;
    let row_h = 22.0;
    let height = 70.0 + row_h * rows.len() as f64 + 30.0;
    let width = label_w + bar_w + 40.0;
    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" viewBox="0 0 {width} {height}" font-family="sans-serif" font-size="11">"#
    );
    let _ = writeln!(s, r#"<rect width="100%" height="100%" fill="white"/>"#);
    let _ = writeln!(
        s,
        r#"<text x="{}" y="22" text-anchor="middle" font-size="14">{}</text>"#,
        width / 2.0,
        esc(title)
    );
    let colors = [
        ("agree adequacy", "#3b6fb6"),
        ("agree fluency", "#d9822b"),
        ("metric tie", "#999999"),
    ];
    for (i, (name, c)) in colors.iter().enumerate() {
        let x = label_w + 120.0 * i as f64;
        let _ = writeln!(
            s,
            r#"<rect x="{x}" y="34" width="10" height="10" fill="{c}"/>"#
        );
        let _ = writeln!(s, r#"<text x="{}" y="43">{name}</text>"#, x + 14.0);
    }
    for (r, (label, a, f, t)) in rows.iter().enumerate() {
        let y = 60.0 + row_h * r as f64;
        let _ = writeln!(
            s,
            r#"<text x="{}" y="{}" text-anchor="end">{}</text>"#,
            label_w - 6.0,
            y + 14.0,
            esc(label)
        );
        let mut x = label_w;
        for (v, (_, c)) in [a, f, t].iter().zip(colors.iter()) {
            let w = (**v).clamp(0.0, 1.0) * bar_w;
            let _ = writeln!(
                s,
                r#"<rect x="{x:.1}" y="{y}" width="{w:.1}" height="{}" fill="{c}"/>"#,
                row_h - 4.0
            );
            x += w;
        }
    }
    s.push_str("</svg>\n");
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn charts_are_well_formed() {
        let p = spa_plane_svg(
            "t<1>",
            &[("m".into(), 0.8, 0.9)],
            &[PlaneLine {
                name: "tradeoff",
                color: "red",
                points: vec![(0.7, 1.0), (1.0, 0.7)],
            }],
        );
        assert!(p.starts_with("<svg") && p.trim_end().ends_with("</svg>"));
        assert!(p.contains("t&lt;1&gt;") && p.contains("<polyline"));
        let b = breakdown_svg("b", &[("m".into(), 0.5, 0.25, 0.25)]);
        assert_eq!(b.matches("<rect").count(), 1 + 3 + 3);
    }
}
