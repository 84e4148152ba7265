# Topocheck package
