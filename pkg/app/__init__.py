# wraploss application package (CLI, bootstrap)
