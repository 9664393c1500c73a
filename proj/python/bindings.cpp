int starkit_placeholder_bindings;
