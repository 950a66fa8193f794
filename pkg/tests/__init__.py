# Tests package for coxeter_saito
