"""Neural surrogate: network, optimizer, training and checkpoints."""
