//! Parsers for report documents, price files and the model configuration.

mod config;
mod prices;
mod report;

pub use config::{load_model_config, ModelConfig, RegistrySection, REQUIRED_DIMENSIONS};
pub use prices::{load_price_series, parse_price_csv, PricePoint, PriceSeries};
pub use report::{
    parse_csd_report, parse_report_stream, split_documents, strip_line_comments, to_document,
    ParseOptions, RegistryMode,
};
