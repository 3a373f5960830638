use std::fmt;

/// A formal nonnegative integer combination of species.
///
/// Stored as `(species index, molecularity)` pairs sorted by species index
/// with every molecularity at least one; the empty complex is the zero
/// complex. Equality is therefore multiset equality.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Complex(Vec<(usize, u32)>);

impl Complex {
    pub fn zero() -> Self {
        Complex(Vec::new())
    }

    /// Builds a complex from arbitrary `(species, count)` terms, summing
    /// repeated species and dropping zero counts.
    pub fn from_terms<I: IntoIterator<Item = (usize, u32)>>(terms: I) -> Self {
        let mut v: Vec<(usize, u32)> = Vec::new();
        for (s, c) in terms {
            if c == 0 {
                continue;
            }
            match v.binary_search_by_key(&s, |e| e.0) {
                Ok(pos) => v[pos].1 += c,
                Err(pos) => v.insert(pos, (s, c)),
            }
        }
        Complex(v)
    }

    pub fn from_dense(counts: &[u32]) -> Self {
        Self::from_terms(counts.iter().enumerate().map(|(i, &c)| (i, c)))
    }

    pub fn single(species: usize) -> Self {
        Complex(vec![(species, 1)])
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_empty()
    }

    pub fn terms(&self) -> &[(usize, u32)] {
        &self.0
    }

    pub fn coefficient(&self, species: usize) -> u32 {
        self.0
            .binary_search_by_key(&species, |e| e.0)
            .map(|p| self.0[p].1)
            .unwrap_or(0)
    }

    /// Total molecularity.
    pub fn order(&self) -> u32 {
        self.0.iter().map(|e| e.1).sum()
    }

    pub fn to_dense(&self, m: usize) -> Vec<u32> {
        let mut v = vec![0; m];
        for &(s, c) in &self.0 {
            v[s] = c;
        }
        v
    }

    /// `self - other` as a signed dense vector.
    pub fn difference(&self, other: &Complex, m: usize) -> Vec<i64> {
        let mut v = vec![0i64; m];
        for &(s, c) in &self.0 {
            v[s] += i64::from(c);
        }
        for &(s, c) in &other.0 {
            v[s] -= i64::from(c);
        }
        v
    }

    pub fn display<'a>(&'a self, names: &'a [String]) -> ComplexDisplay<'a> {
        ComplexDisplay { complex: self, names }
    }
}

pub struct ComplexDisplay<'a> {
    complex: &'a Complex,
    names: &'a [String],
}

impl fmt::Display for ComplexDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.complex.is_zero() {
            return write!(f, "0");
        }
        for (i, &(s, c)) in self.complex.0.iter().enumerate() {
            if i > 0 {
                write!(f, " + ")?;
            }
            if c > 1 {
                write!(f, "{c} ")?;
            }
            write!(f, "{}", self.names[s])?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn terms_are_merged_and_sorted() {
        let c = Complex::from_terms([(2, 1), (0, 1), (2, 1), (1, 0)]);
        assert_eq!(c.terms(), &[(0, 1), (2, 2)]);
        assert_eq!(c.order(), 3);
        assert_eq!(c.coefficient(1), 0);
    }

    #[test]
    fn display_uses_names() {
        let names = vec!["A".to_string(), "B".to_string()];
        let c = Complex::from_terms([(0, 2), (1, 1)]);
        assert_eq!(c.display(&names).to_string(), "2 A + B");
        assert_eq!(Complex::zero().display(&names).to_string(), "0");
    }
}
