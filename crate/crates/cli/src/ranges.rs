//! Sweep lists: comma-separated items, each a value or `start:stop[:step]`.
//! Float ranges need a step; integer ranges default to step 1. Both include
//! `stop` when it lies on the grid.

pub fn parse_floats(s: &str) -> Result<Vec<f64>, String> {
    let mut out = Vec::new();
    for item in s.split(',').map(str::trim).filter(|i| !i.is_empty()) {
        let parts: Vec<&str> = item.split(':').collect();
        let num = |p: &str| p.trim().parse::<f64>().map_err(|_| format!("bad number {p:?} in {s:?}"));
        match parts.as_slice() {
            [v] => out.push(num(v)?),
            [a, b, step] => {
                let (a, b, step) = (num(a)?, num(b)?, num(step)?);
                if !(step > 0.0 && step.is_finite() && a.is_finite() && b.is_finite()) || b < a {
                    return Err(format!("range {item:?} needs start <= stop and a positive step"));
                }
                let n = ((b - a) / step + 1e-9).floor() as usize;
                if n > 10_000_000 {
                    return Err(format!("range {item:?} has too many points"));
                }
                out.extend((0..=n).map(|k| snap(a + k as f64 * step)));
            }
            _ => return Err(format!("float range {item:?} must be a value or start:stop:step")),
        }
    }
    if out.is_empty() {
        return Err("empty list".into());
    }
    Ok(out)
}

/// Drops the accumulated rounding noise of `a + k * step` (12 significant digits).
fn snap(x: f64) -> f64 {
    format!("{x:.11e}").parse().unwrap_or(x)
}

pub fn parse_ints(s: &str) -> Result<Vec<usize>, String> {
    let mut out = Vec::new();
    for item in s.split(',').map(str::trim).filter(|i| !i.is_empty()) {
        let parts: Vec<&str> = item.split(':').collect();
        let num = |p: &str| p.trim().parse::<usize>().map_err(|_| format!("bad integer {p:?} in {s:?}"));
        let (a, b, step) = match parts.as_slice() {
            [v] => {
                out.push(num(v)?);
                continue;
            }
            [a, b] => (num(a)?, num(b)?, 1),
            [a, b, step] => (num(a)?, num(b)?, num(step)?),
            _ => return Err(format!("integer range {item:?} must be a value or start:stop[:step]")),
        };
        if step == 0 || b < a {
            return Err(format!("range {item:?} needs start <= stop and a positive step"));
        }
        out.extend((a..=b).step_by(step));
    }
    if out.is_empty() {
        return Err("empty list".into());
    }
    Ok(out)
}
