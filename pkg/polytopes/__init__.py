# Package initialization for polytopes module
