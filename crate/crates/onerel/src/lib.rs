//! File formats, query reports, the product-search oracle and the corpus runner
//! behind the `onerel` command line tool.

pub mod corpus;
pub mod format;
pub mod oracle;
pub mod query;
pub mod report;
