# Package initialization for utils module
