#![allow(dead_code)]

use nemo::corpus::{Corpus, EdgeKind, EdgeRecord};
use nemo_core::{EntityClass, Identity, IdentityRef, NetworkKind};

/// Hand-built corpus for small oracle scenarios.
pub struct World {
    pub corpus: Corpus,
}

impl World {
    pub fn new() -> Self {
        Self {
            corpus: Corpus::empty(NetworkKind::new("source").unwrap(), NetworkKind::new("target").unwrap()),
        }
    }

    fn person(&self, target: bool, id: &str, name: &str) -> Identity {
        Identity {
            network: if target { self.corpus.target.clone() } else { self.corpus.source.clone() },
            user_id: id.into(),
            username: id.into(),
            display_name: name.into(),
            location: None,
            profile_image: None,
            url_field: None,
            searchable: true,
            posts_public: true,
            friendlist_public: false,
            entity_class: EntityClass::Person,
        }
    }

    pub fn source(&mut self, id: &str, name: &str, url_field: Option<String>) -> IdentityRef {
        let mut p = self.person(false, id, name);
        p.url_field = url_field;
        self.corpus.identities.push(p);
        self.corpus.source_ref(id)
    }

    pub fn target(&mut self, id: &str, name: &str, friendlist_public: bool) -> IdentityRef {
        let mut p = self.person(true, id, name);
        p.friendlist_public = friendlist_public;
        self.corpus.identities.push(p);
        self.corpus.target_ref(id)
    }

    pub fn follow(&mut self, from: &str, to: &str) {
        self.corpus.edges.push(EdgeRecord {
            network: self.corpus.source.as_str().into(),
            from: from.into(),
            to: to.into(),
            kind: EdgeKind::Follow,
        });
    }

    pub fn befriend(&mut self, a: &str, b: &str) {
        self.corpus.edges.push(EdgeRecord {
            network: self.corpus.target.as_str().into(),
            from: a.into(),
            to: b.into(),
            kind: EdgeKind::Friend,
        });
    }

    pub fn profile_url(&self, username: &str) -> String {
        self.corpus.target.profile_url(username)
    }
}
