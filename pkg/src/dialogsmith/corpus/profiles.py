"""Bundled seed texts for the character-trigram language detector.

A few hundred characters per language is plenty for trigram statistics at
the granularity we need (is this conversation English or not).  Texts are
plain everyday prose with a bit of health vocabulary mixed in, since that
is the register the pipeline mostly sees.
"""

PROFILE_TEXTS = {
    "en": (
        "The doctor asked how long the pain had lasted and whether it got "
        "worse at night. Most people recover within a few weeks if they rest "
        "and drink enough water. She explained that the treatment works best "
        "when it starts early, and that side effects are usually mild. "
        "Please call the clinic if the fever returns or if you feel dizzy. "
        "The study followed two hundred patients for a year and measured "
        "blood pressure, weight, and sleep quality. There is no reason to "
        "worry, but we should check the results again next month. Thank you "
        "for coming in today; the nurse will schedule your next visit. "
        "Regular exercise and a balanced diet lower the risk of heart "
        "disease. What questions do you have about the medication?"
    ),
    "de": (
        "Der Arzt fragte, wie lange die Schmerzen schon andauern und ob sie "
        "nachts schlimmer werden. Die meisten Menschen erholen sich innerhalb "
        "weniger Wochen, wenn sie sich ausruhen und genug Wasser trinken. "
        "Sie erklärte, dass die Behandlung am besten wirkt, wenn sie früh "
        "beginnt, und dass die Nebenwirkungen meist mild sind. Bitte rufen "
        "Sie in der Praxis an, wenn das Fieber zurückkommt oder Ihnen "
        "schwindelig wird. Die Studie begleitete zweihundert Patienten ein "
        "Jahr lang und maß Blutdruck, Gewicht und Schlafqualität. Es gibt "
        "keinen Grund zur Sorge, aber wir sollten die Ergebnisse nächsten "
        "Monat noch einmal prüfen. Vielen Dank für Ihren Besuch heute."
    ),
    "fr": (
        "Le médecin a demandé depuis combien de temps la douleur durait et "
        "si elle empirait la nuit. La plupart des gens se rétablissent en "
        "quelques semaines s'ils se reposent et boivent assez d'eau. Elle a "
        "expliqué que le traitement fonctionne mieux quand il commence tôt, "
        "et que les effets secondaires sont généralement légers. Veuillez "
        "appeler la clinique si la fièvre revient ou si vous avez des "
        "vertiges. L'étude a suivi deux cents patients pendant un an et a "
        "mesuré la tension artérielle, le poids et la qualité du sommeil. "
        "Il n'y a aucune raison de s'inquiéter, mais nous devrions vérifier "
        "les résultats le mois prochain. Merci d'être venu aujourd'hui."
    ),
    "es": (
        "El médico preguntó cuánto tiempo llevaba el dolor y si empeoraba "
        "por la noche. La mayoría de las personas se recuperan en pocas "
        "semanas si descansan y beben suficiente agua. Ella explicó que el "
        "tratamiento funciona mejor cuando empieza pronto, y que los efectos "
        "secundarios suelen ser leves. Por favor llame a la clínica si la "
        "fiebre vuelve o si se siente mareado. El estudio siguió a "
        "doscientos pacientes durante un año y midió la presión arterial, "
        "el peso y la calidad del sueño. No hay motivo para preocuparse, "
        "pero deberíamos revisar los resultados el mes que viene. Gracias "
        "por venir hoy; la enfermera programará su próxima visita."
    ),
    "it": (
        "Il medico ha chiesto da quanto tempo durava il dolore e se "
        "peggiorava di notte. La maggior parte delle persone guarisce in "
        "poche settimane se riposa e beve abbastanza acqua. Ha spiegato che "
        "la terapia funziona meglio quando inizia presto, e che gli effetti "
        "collaterali sono di solito lievi. Per favore chiami la clinica se "
        "la febbre ritorna o se si sente stordito. Lo studio ha seguito "
        "duecento pazienti per un anno e ha misurato la pressione, il peso "
        "e la qualità del sonno. Non c'è motivo di preoccuparsi, ma "
        "dovremmo controllare di nuovo i risultati il mese prossimo."
    ),
    "pt": (
        "O médico perguntou há quanto tempo a dor durava e se piorava à "
        "noite. A maioria das pessoas se recupera em poucas semanas se "
        "descansar e beber água suficiente. Ela explicou que o tratamento "
        "funciona melhor quando começa cedo, e que os efeitos colaterais "
        "costumam ser leves. Por favor, ligue para a clínica se a febre "
        "voltar ou se você sentir tontura. O estudo acompanhou duzentos "
        "pacientes durante um ano e mediu a pressão arterial, o peso e a "
        "qualidade do sono. Não há motivo para preocupação, mas devemos "
        "verificar os resultados novamente no próximo mês. Obrigado por "
        "vir hoje; a enfermeira marcará sua próxima consulta."
    ),
    "nl": (
        "De arts vroeg hoe lang de pijn al duurde en of die 's nachts erger "
        "werd. De meeste mensen herstellen binnen enkele weken als ze "
        "rusten en genoeg water drinken. Ze legde uit dat de behandeling "
        "het beste werkt als die vroeg begint, en dat de bijwerkingen "
        "meestal mild zijn. Bel de kliniek als de koorts terugkomt of als u "
        "zich duizelig voelt. Het onderzoek volgde tweehonderd patiënten "
        "een jaar lang en mat de bloeddruk, het gewicht en de slaapkwaliteit. "
        "Er is geen reden tot zorgen, maar we moeten de resultaten volgende "
        "maand opnieuw bekijken. Bedankt voor uw komst vandaag."
    ),
    "sv": (
        "Läkaren frågade hur länge smärtan hade pågått och om den blev "
        "värre på natten. De flesta återhämtar sig inom några veckor om de "
        "vilar och dricker tillräckligt med vatten. Hon förklarade att "
        "behandlingen fungerar bäst när den börjar tidigt och att "
        "biverkningarna oftast är milda. Ring kliniken om febern kommer "
        "tillbaka eller om du känner dig yr. Studien följde tvåhundra "
        "patienter under ett år och mätte blodtryck, vikt och sömnkvalitet. "
        "Det finns ingen anledning till oro, men vi bör kontrollera "
        "resultaten igen nästa månad. Tack för att du kom idag."
    ),
    "ru": (
        "Врач спросил, как давно длится боль и усиливается ли она ночью. "
        "Большинство людей выздоравливают за несколько недель, если "
        "отдыхают и пьют достаточно воды. Она объяснила, что лечение "
        "работает лучше всего, когда начинается рано, и что побочные "
        "эффекты обычно лёгкие. Пожалуйста, позвоните в клинику, если "
        "температура вернётся или если вы почувствуете головокружение. "
        "Исследование наблюдало двести пациентов в течение года и измеряло "
        "давление, вес и качество сна. Нет причин для беспокойства, но нам "
        "следует проверить результаты ещё раз в следующем месяце."
    ),
}
