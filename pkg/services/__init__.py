"""Application services (orchestration layer).

Services load and validate configs, prepare data, drive the trainer and
write artifacts through storage. They never parse command lines.
"""
