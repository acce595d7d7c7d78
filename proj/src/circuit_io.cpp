namespace csaforge {}
