use std::fmt;
use std::str::FromStr;

/// `n` evenly spaced points from `start` to `stop` inclusive, written `a:b:n`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridSpec {
    pub start: f64,
    pub stop: f64,
    pub count: usize,
}

impl GridSpec {
    pub fn points(&self) -> Vec<f64> {
        let step = (self.stop - self.start) / (self.count - 1) as f64;
        (0..self.count)
            .map(|i| {
                if i + 1 == self.count {
                    self.stop
                } else {
                    self.start + step * i as f64
                }
            })
            .collect()
    }
}

impl FromStr for GridSpec {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let parts: Vec<&str> = s.split(':').collect();
        let [a, b, n] = parts[..] else {
            return Err(format!("expected a:b:n, got '{s}'"));
        };
        let start: f64 = a
            .trim()
            .parse()
            .map_err(|_| format!("bad grid start '{a}'"))?;
        let stop: f64 = b
            .trim()
            .parse()
            .map_err(|_| format!("bad grid stop '{b}'"))?;
        let count: usize = n
            .trim()
            .parse()
            .map_err(|_| format!("bad grid count '{n}'"))?;
        if !(start.is_finite() && stop.is_finite() && start < stop) {
            return Err(format!(
                "grid needs finite start < stop, got {start}:{stop}"
            ));
        }
        if count < 2 {
            return Err(format!("grid needs at least 2 points, got {count}"));
        }
        Ok(GridSpec { start, stop, count })
    }
}

impl fmt::Display for GridSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}:{}", self.start, self.stop, self.count)
    }
}
