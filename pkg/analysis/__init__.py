# Package initialization for analysis module
