/// Multiset of `(port, payload)` messages exchanged at one instant.
///
/// Entries keep their delivery order and are never coalesced, so two
/// messages on the same port are both observed.
#[derive(Debug, Clone, PartialEq)]
pub struct EventBag<M> {
    entries: Vec<(String, M)>,
}

impl<M> Default for EventBag<M> {
    fn default() -> Self {
        Self {
            entries: Vec::new(),
        }
    }
}

impl<M> EventBag<M> {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&mut self, port: impl Into<String>, payload: M) {
        self.entries.push((port.into(), payload));
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, &M)> {
        self.entries.iter().map(|(p, m)| (p.as_str(), m))
    }

    /// Payloads received on `port`, in bag order.
    pub fn on_port<'a>(&'a self, port: &'a str) -> impl Iterator<Item = &'a M> + 'a {
        self.entries
            .iter()
            .filter(move |(p, _)| p == port)
            .map(|(_, m)| m)
    }

    pub fn into_entries(self) -> Vec<(String, M)> {
        self.entries
    }
}

impl<M> FromIterator<(String, M)> for EventBag<M> {
    fn from_iter<I: IntoIterator<Item = (String, M)>>(iter: I) -> Self {
        Self {
            entries: iter.into_iter().collect(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn keeps_duplicates_on_same_port() {
        let mut bag = EventBag::new();
        bag.push("in", 1);
        bag.push("in", 1);
        bag.push("other", 2);
        assert_eq!(bag.len(), 3);
        assert_eq!(bag.on_port("in").count(), 2);
        assert_eq!(bag.on_port("other").copied().collect::<Vec<_>>(), vec![2]);
        assert_eq!(bag.on_port("missing").count(), 0);
    }

    #[test]
    fn empty_bag() {
        let bag: EventBag<u8> = EventBag::new();
        assert!(bag.is_empty());
        assert_eq!(bag.iter().count(), 0);
    }
}
