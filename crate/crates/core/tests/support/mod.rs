pub mod checks;
pub mod oracle;
pub mod worked;
