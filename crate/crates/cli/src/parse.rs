use std::path::Path;

use magcoh::gdyn::FrequencyProfile;
use num_complex::Complex64;

/// Parses `a+bi`, `a-bi`, a bare real `a` or a bare imaginary `bi`.
pub fn complex(s: &str) -> Result<Complex64, String> {
    let t: String = s.chars().filter(|c| !c.is_whitespace()).collect();
    let bad = || format!("expected a complex number like 1.5-0.2i, got `{s}`");
    let Some(body) = t.strip_suffix('i') else {
        return t.parse::<f64>().map(|re| Complex64::new(re, 0.0)).map_err(|_| bad());
    };
    let bytes = body.as_bytes();
    let split = (1..bytes.len())
        .rev()
        .find(|&k| (bytes[k] == b'+' || bytes[k] == b'-') && !matches!(bytes[k - 1], b'e' | b'E'));
    let (re, im) = match split {
        Some(k) => (&body[..k], &body[k..]),
        None => ("0", body),
    };
    let im = match im {
        "" | "+" => "1",
        "-" => "-1",
        other => other,
    };
    let re: f64 = re.parse().map_err(|_| bad())?;
    let im: f64 = im.parse().map_err(|_| bad())?;
    Ok(Complex64::new(re, im))
}

/// Parses `x,y`.
pub fn pair(s: &str) -> Result<[f64; 2], String> {
    let (a, b) = s.split_once(',').ok_or_else(|| format!("expected x,y, got `{s}`"))?;
    let a = a.trim().parse().map_err(|_| format!("bad number `{a}`"))?;
    let b = b.trim().parse().map_err(|_| format!("bad number `{b}`"))?;
    Ok([a, b])
}

/// Parses a comma list `a,b,c` or an inclusive linear range `start:stop:count`.
pub fn range(s: &str) -> Result<Vec<f64>, String> {
    let num = |v: &str| v.trim().parse::<f64>().map_err(|_| format!("bad number `{v}` in `{s}`"));
    let values = if let Some((start, rest)) = s.split_once(':') {
        let (stop, count) = rest.split_once(':').ok_or_else(|| format!("expected start:stop:count, got `{s}`"))?;
        let (a, b) = (num(start)?, num(stop)?);
        let n: usize = count.trim().parse().map_err(|_| format!("bad count `{count}`"))?;
        match n {
            0 => Vec::new(),
            1 => vec![a],
            _ => (0..n).map(|k| a + (b - a) * k as f64 / (n - 1) as f64).collect(),
        }
    } else {
        s.split(',').filter(|v| !v.trim().is_empty()).map(num).collect::<Result<_, _>>()?
    };
    if values.is_empty() {
        return Err(format!("empty range `{s}`"));
    }
    Ok(values)
}

/// Parses `constant`, `step:THETA,TAU`, `kick:GAMMA`, `parametric:GAMMA` or
/// `file:PATH`; times are in units of `1 / omega_c`.
pub fn profile(s: &str, omega_c: f64) -> Result<FrequencyProfile, String> {
    let (kind, arg) = s.split_once(':').unwrap_or((s, ""));
    let num = |v: &str| v.trim().parse::<f64>().map_err(|_| format!("bad number `{v}` in profile `{s}`"));
    let built = match kind {
        "constant" if arg.is_empty() => FrequencyProfile::constant(omega_c),
        "step" => {
            let [theta, tau] = pair(arg)?;
            FrequencyProfile::step(omega_c, theta, tau / omega_c)
        }
        "kick" => FrequencyProfile::kick(omega_c, num(arg)?),
        "parametric" => FrequencyProfile::parametric(omega_c, num(arg)?),
        "file" => return profile_file(Path::new(arg), omega_c),
        _ => return Err(format!("unknown profile `{s}`; expected constant, step:T,tau, kick:g, parametric:g or file:path")),
    };
    built.map_err(|e| e.to_string())
}

/// Reads `t,ratio` rows (time in units of `1 / omega_c`, `omega / omega_c`);
/// blank lines, `#` comments and a non-numeric header are skipped.
fn profile_file(path: &Path, omega_c: f64) -> Result<FrequencyProfile, String> {
    let text = std::fs::read_to_string(path).map_err(|e| format!("cannot read {}: {e}", path.display()))?;
    let mut times = Vec::new();
    let mut ratios = Vec::new();
    for (k, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        match pair(line) {
            Ok([t, r]) => {
                times.push(t / omega_c);
                ratios.push(r);
            }
            Err(_) if times.is_empty() && k == 0 => continue,
            Err(e) => return Err(format!("{}:{}: {e}", path.display(), k + 1)),
        }
    }
    FrequencyProfile::sampled(omega_c, times, ratios).map_err(|e| e.to_string())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn complex_forms() {
        let c = |re, im| Complex64::new(re, im);
        assert_eq!(complex("1+0i").unwrap(), c(1.0, 0.0));
        assert_eq!(complex("-0.5-2i").unwrap(), c(-0.5, -2.0));
        assert_eq!(complex("1e-3+2.5e-1i").unwrap(), c(1e-3, 0.25));
        assert_eq!(complex("3").unwrap(), c(3.0, 0.0));
        assert_eq!(complex("-2i").unwrap(), c(0.0, -2.0));
        assert_eq!(complex("1-i").unwrap(), c(1.0, -1.0));
        assert!(complex("1+").is_err());
        assert!(complex("abc").is_err());
    }

    #[test]
    fn ranges() {
        assert_eq!(range("0,0.5,2").unwrap(), vec![0.0, 0.5, 2.0]);
        assert_eq!(range("0:1:3").unwrap(), vec![0.0, 0.5, 1.0]);
        assert!(range("0:1:0").is_err());
        assert!(range("").is_err());
    }

    #[test]
    fn profiles() {
        assert!(profile("constant", 1.0).is_ok());
        assert!(profile("step:0.25,3.0", 1.0).is_ok());
        assert!(profile("kick:0.5", 1.0).is_ok());
        assert!(profile("parametric:0.05", 1.0).is_ok());
        assert!(profile("wobble:1", 1.0).is_err());
        assert!(profile("step:0.2", 1.0).is_err());
    }
}
