# Marks this directory as a package for absolute imports.
