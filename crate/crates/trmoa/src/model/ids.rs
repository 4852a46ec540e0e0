use std::fmt;

macro_rules! id_type {
    ($(#[$doc:meta])* $name:ident) => {
        $(#[$doc])*
        #[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
        pub struct $name(pub u32);

        impl $name {
            #[inline]
            pub fn index(self) -> usize {
                self.0 as usize
            }
        }

        impl From<usize> for $name {
            #[inline]
            fn from(i: usize) -> Self {
                $name(i as u32)
            }
        }

        impl fmt::Display for $name {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                write!(f, "{}", self.0)
            }
        }
    };
}

id_type!(
    /// Dense index of a user in the trajectory database.
    UserId
);
id_type!(
    /// Dense index of a tag in the tag universe.
    TagId
);
id_type!(
    /// Dense index of a billboard (board) in the catalog.
    BoardId
);
id_type!(
    /// Dense index of a billboard slot in the catalog.
    SlotId
);
id_type!(
    /// Dense index of an advertiser in the advertiser book.
    AdvId
);
