//! Angles written as multiples of pi: `pi`, `pi/4`, `3pi/4`, `3*pi/4`,
//! `-pi/2`, `0.5pi`, or a plain number of radians.

use std::f64::consts::PI;

pub fn parse_angle(text: &str) -> Result<f64, String> {
    let s: String = text.chars().filter(|c| !c.is_whitespace()).collect();
    if s.is_empty() {
        return Err("empty angle".into());
    }
    let bad = || format!("cannot read angle \"{text}\"");
    let lower = s.to_ascii_lowercase();
    let Some(at) = lower.find("pi") else {
        return lower.parse::<f64>().map_err(|_| bad()).and_then(finite(text));
    };
    let (head, tail) = (&lower[..at], &lower[at + 2..]);
    let head = head.strip_suffix('*').unwrap_or(head);
    let coefficient = match head {
        "" | "+" => 1.0,
        "-" => -1.0,
        h => h.parse::<f64>().map_err(|_| bad())?,
    };
    let divisor = match tail {
        "" => 1.0,
        t => t.strip_prefix('/').ok_or_else(bad)?.parse::<f64>().map_err(|_| bad())?,
    };
    if divisor == 0.0 {
        return Err(format!("division by zero in \"{text}\""));
    }
    finite(text)(coefficient * PI / divisor)
}

fn finite(text: &str) -> impl Fn(f64) -> Result<f64, String> + '_ {
    move |v| if v.is_finite() { Ok(v) } else { Err(format!("angle \"{text}\" is not finite")) }
}

/// Comma-separated list, e.g. `pi/2,pi/4`.
pub fn parse_angles(text: &str) -> Result<Vec<f64>, String> {
    text.split(',').map(parse_angle).collect()
}
